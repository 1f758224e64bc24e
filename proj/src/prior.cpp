#include "bql/prior.hpp"

#include <cmath>
#include <utility>

#include "bql/error.hpp"

namespace bql {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) out[j] = lo + h * static_cast<double>(j);
  out.back() = hi;
  return out;
}

double uniform_spacing(const std::vector<double>& grid, double rel_tol) {
  if (grid.size() < 2) throw Error(ErrorCode::NonUniformGrid, "grid needs at least two points");
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) throw Error(ErrorCode::NonUniformGrid, "grid must be strictly increasing");
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (std::abs((grid[j] - grid[j - 1]) - h) > rel_tol * h + 1e-12 * std::abs(grid[j])) {
      throw Error(ErrorCode::NonUniformGrid, "grid spacing varies at index " + std::to_string(j));
    }
  }
  return h;
}

DiscretePrior::DiscretePrior(PriorKind kind, std::vector<double> grid, std::vector<double> density)
    : kind_(kind), grid_(std::move(grid)), density_(std::move(density)) {
  if (grid_.size() != density_.size()) {
    throw Error(ErrorCode::GridMismatch, "prior grid and density sizes differ");
  }
  spacing_ = uniform_spacing(grid_);
  double total = 0.0;
  for (double w : density_) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "prior density must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "prior density has zero mass");
  for (double& w : density_) w /= total * spacing_;

  double m = 0.0;
  for (std::size_t j = 0; j < grid_.size(); ++j) m += probability(j) * grid_[j];
  mean_ = m;
  double v = 0.0;
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    const double d = grid_[j] - mean_;
    v += probability(j) * d * d;
  }
  variance_ = v;
}

DiscretePrior DiscretePrior::uniform(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw Error(ErrorCode::InvalidArgument, "uniform prior needs lo < hi and n >= 2");
  const double h = (hi - lo) / static_cast<double>(n);
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) grid[j] = lo + h * (static_cast<double>(j) + 0.5);
  return DiscretePrior(PriorKind::UniformInterval, std::move(grid), std::vector<double>(n, 1.0));
}

DiscretePrior DiscretePrior::gaussian(double mean, double sigma, std::size_t n, double half_width) {
  if (!(sigma > 0.0) || !(half_width > 0.0) || n < 2) {
    throw Error(ErrorCode::InvalidArgument, "gaussian prior needs sigma > 0, half_width > 0, n >= 2");
  }
  std::vector<double> grid = linspace(mean - half_width, mean + half_width, n);
  std::vector<double> density(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double z = (grid[j] - mean) / sigma;
    density[j] = std::exp(-0.5 * z * z);
  }
  return DiscretePrior(PriorKind::Gaussian, std::move(grid), std::move(density));
}

DiscretePrior DiscretePrior::from_density(std::vector<double> grid, std::vector<double> density) {
  return DiscretePrior(PriorKind::Custom, std::move(grid), std::move(density));
}

std::vector<double> DiscretePrior::probabilities() const {
  std::vector<double> p(size());
  for (std::size_t j = 0; j < size(); ++j) p[j] = probability(j);
  return p;
}

std::vector<double> DiscretePrior::centered_grid() const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < size(); ++j) out[j] = grid_[j] - mean_;
  return out;
}

}  // namespace bql
