#pragma once

#include <cstddef>
#include <vector>

namespace bql {

/** n equally spaced points from lo to hi inclusive. */
std::vector<double> linspace(double lo, double hi, std::size_t n);

/** Common spacing of a uniform grid; throws NonUniformGrid otherwise. */
double uniform_spacing(const std::vector<double>& grid, double rel_tol = 1e-9);

enum class PriorKind { UniformInterval, Gaussian, Custom };

/**
 * Prior density sampled on a uniform parameter grid.
 *
 * density(j) * spacing() is the probability of cell j; the probabilities sum
 * to one. mean() and variance() use the same discretization, so statistics
 * computed from cell probabilities are exact for the discrete problem.
 */
class DiscretePrior {
 public:
  /** Flat prior on (lo, hi) sampled at the n cell midpoints. */
  static DiscretePrior uniform(double lo, double hi, std::size_t n);

  /** Gaussian prior on n points spanning mean ± half_width inclusive. */
  static DiscretePrior gaussian(double mean, double sigma, std::size_t n, double half_width);

  /** Arbitrary nonnegative density on a uniform grid, renormalized. */
  static DiscretePrior from_density(std::vector<double> grid, std::vector<double> density);

  PriorKind kind() const { return kind_; }
  std::size_t size() const { return grid_.size(); }
  const std::vector<double>& grid() const { return grid_; }
  double spacing() const { return spacing_; }
  double density(std::size_t j) const { return density_[j]; }
  const std::vector<double>& densities() const { return density_; }
  double probability(std::size_t j) const { return density_[j] * spacing_; }
  std::vector<double> probabilities() const;

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  /** Grid offsets from the prior mean. */
  std::vector<double> centered_grid() const;

  double lower() const { return grid_.front(); }
  double upper() const { return grid_.back(); }

 private:
  DiscretePrior(PriorKind kind, std::vector<double> grid, std::vector<double> density);

  PriorKind kind_;
  std::vector<double> grid_;
  std::vector<double> density_;
  double spacing_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

}  // namespace bql
