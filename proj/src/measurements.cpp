#include "bql/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <tuple>

#include "bql/error.hpp"
#include "bql/subspace.hpp"

namespace bql {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogZero = -1e30;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::size_t sample_index(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<double> prior_cdf(const DiscretePrior& prior) {
  std::vector<double> cdf(prior.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    acc += prior.probability(j);
    cdf[j] = acc;
  }
  return cdf;
}

std::pair<double, double> batch_mean(const std::vector<double>& values, std::size_t batches) {
  const std::size_t n = values.size();
  double total = 0.0;
  for (double v : values) total += v;
  const double mean = total / static_cast<double>(n);
  batches = std::max<std::size_t>(2, std::min(batches, n));
  const std::size_t per = n / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) means[b] += values[i];
    means[b] /= static_cast<double>(per);
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(batches);
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  var /= static_cast<double>(batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(batches))};
}

McResult summarize(const std::vector<double>& post_var, const std::vector<double>& sq_err, std::size_t batches) {
  McResult r;
  r.trials = post_var.size();
  std::tie(r.bmse, r.se) = batch_mean(post_var, batches);
  std::tie(r.squared_error, r.squared_error_se) = batch_mean(sq_err, batches);
  return r;
}

}  // namespace

double DiscretizedBath::total_number(std::size_t i) const {
  return alpha.row(static_cast<Eigen::Index>(i)).squaredNorm();
}

std::size_t bins_for_duration(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "duration and bin width must be positive");
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9)) + 1;
}

DiscretizedBath discretize(const EstimationProblem& problem, std::size_t M, double dt) {
  EstimationProblem checked = problem;
  checked.sampling_dt = dt;
  checked.validate();
  DiscretizedBath b;
  b.M = M;
  b.dt = dt;
  b.grid = problem.grid();
  b.times = bin_times(problem.signal, M, dt);
  b.alpha = bin_amplitudes(problem, M, dt);
  b.phase_per_bin = (b.grid.back() - b.grid.front()) * dt;
  return b;
}

DiscretizedBath bath_from_amplitudes(std::vector<double> grid, Eigen::MatrixXcd alpha, double dt) {
  if (static_cast<std::size_t>(alpha.rows()) != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "amplitude table rows must match the grid");
  }
  DiscretizedBath b;
  b.M = static_cast<std::size_t>(alpha.cols());
  b.dt = dt;
  b.times.resize(b.M);
  for (std::size_t j = 0; j < b.M; ++j) b.times[j] = dt * static_cast<double>(j);
  b.phase_per_bin = grid.empty() ? 0.0 : (grid.back() - grid.front()) * dt;
  b.grid = std::move(grid);
  b.alpha = std::move(alpha);
  return b;
}

GramMatrix gram_discretized(const DiscretizedBath& bath) {
  const Eigen::Index n = bath.alpha.rows();
  const Eigen::MatrixXcd ip = bath.alpha.conjugate() * bath.alpha.transpose();
  GramMatrix G;
  G.grid = bath.grid;
  G.entries.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    G.entries(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const cplx v = std::exp(-0.5 * ip(j, j).real() - 0.5 * ip(k, k).real() + ip(j, k));
      G.entries(j, k) = v;
      G.entries(k, j) = std::conj(v);
    }
  }
  return G;
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::TimeQuadrature: return "TimeQuadrature";
    case SchemeKind::TimeCounting: return "TimeCounting";
    case SchemeKind::FourierCounting: return "FourierCounting";
    case SchemeKind::WhiteningProjection: return "WhiteningProjection";
  }
  return "";
}

Eigen::MatrixXcd mode_transform(FourierTransform transform, std::size_t M) {
  const auto n = static_cast<Eigen::Index>(M);
  const double m = static_cast<double>(M);
  Eigen::MatrixXcd F(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (transform == FourierTransform::DFT) {
        F(k, j) = std::polar(1.0 / std::sqrt(m), -2.0 * kPi * static_cast<double>(k * j) / m);
      } else {
        const double c = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
        F(k, j) = c * std::cos(kPi * (static_cast<double>(j) + 0.5) * static_cast<double>(k) / m);
      }
    }
  }
  return F;
}

SchemeModel scheme_model(const DiscretizedBath& bath, const MeasurementScheme& scheme) {
  SchemeModel model;
  model.scheme = scheme;
  switch (scheme.kind) {
    case SchemeKind::TimeQuadrature:
      model.mean = std::sqrt(2.0) * bath.alpha.imag();
      break;
    case SchemeKind::TimeCounting:
      model.mean = bath.alpha.cwiseAbs2();
      break;
    case SchemeKind::FourierCounting: {
      const Eigen::MatrixXcd F = mode_transform(scheme.transform, bath.M);
      model.mean = (bath.alpha * F.transpose()).cwiseAbs2();
      break;
    }
    case SchemeKind::WhiteningProjection:
      throw Error(ErrorCode::InvalidArgument, "whitening projection has no time-bin outcome model");
  }
  if (scheme.kind != SchemeKind::TimeQuadrature) {
    model.log_rate = model.mean.unaryExpr([](double r) { return r > 0.0 ? std::log(r) : kLogZero; });
  }
  return model;
}

Eigen::VectorXd sample_outcome(const SchemeModel& model, std::size_t grid_index, std::mt19937_64& rng) {
  const auto row = model.mean.row(static_cast<Eigen::Index>(grid_index));
  Eigen::VectorXd y(row.size());
  if (model.scheme.kind == SchemeKind::TimeQuadrature) {
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
    for (Eigen::Index j = 0; j < row.size(); ++j) y(j) = row(j) + noise(rng);
  } else {
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (row(j) > 0.0) {
        std::poisson_distribution<long> counts(row(j));
        y(j) = static_cast<double>(counts(rng));
      } else {
        y(j) = 0.0;
      }
    }
  }
  return y;
}

Eigen::VectorXd sample_outcome(const DiscretizedBath& bath, const MeasurementScheme& scheme, std::size_t grid_index,
                               std::mt19937_64& rng) {
  return sample_outcome(scheme_model(bath, scheme), grid_index, rng);
}

Eigen::VectorXd log_likelihood(const SchemeModel& model, const Eigen::VectorXd& outcome) {
  if (model.scheme.kind == SchemeKind::TimeQuadrature) {
    return -(model.mean.rowwise() - outcome.transpose()).rowwise().squaredNorm();
  }
  Eigen::VectorXd ll = model.log_rate * outcome - model.mean.rowwise().sum();
  return ll.unaryExpr([](double v) { return std::max(v, kLogZero); });
}

GridPosterior posterior_from_log_likelihood(const DiscretePrior& prior, const Eigen::VectorXd& log_likelihood) {
  const std::size_t n = prior.size();
  if (static_cast<std::size_t>(log_likelihood.size()) != n) {
    throw Error(ErrorCode::GridMismatch, "likelihood length does not match the prior grid");
  }
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (prior.probability(j) > 0.0) top = std::max(top, log_likelihood(static_cast<Eigen::Index>(j)));
  }
  GridPosterior p;
  p.weights.resize(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = prior.probability(j) * std::exp(log_likelihood(static_cast<Eigen::Index>(j)) - top);
    p.weights[j] = w;
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw Error(ErrorCode::AllZeroPosterior, "posterior vanishes on the grid");
  const auto& grid = prior.grid();
  double m1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    p.weights[j] /= total;
    m1 += p.weights[j] * grid[j];
  }
  double m2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) m2 += p.weights[j] * (grid[j] - m1) * (grid[j] - m1);
  p.mean = m1;
  p.variance = m2;
  return p;
}

GridPosterior posterior_on_grid(const SchemeModel& model, const DiscretePrior& prior, const Eigen::VectorXd& outcome) {
  return posterior_from_log_likelihood(prior, log_likelihood(model, outcome));
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ULL)));
}

McResult bmse_monte_carlo(const DiscretizedBath& bath, const DiscretePrior& prior, const MeasurementScheme& scheme,
                          const McOptions& options) {
  if (options.trials < 100) throw Error(ErrorCode::InvalidArgument, "at least 100 trials are required");
  if (prior.size() != bath.grid.size()) throw Error(ErrorCode::GridMismatch, "prior and bath grids differ");
  const SchemeModel model = scheme_model(bath, scheme);
  const auto cdf = prior_cdf(prior);
  std::vector<double> post_var(options.trials);
  std::vector<double> sq_err(options.trials);
  parallel_for(options.trials, options.threads, [&](std::size_t t) {
    auto rng = trial_rng(options.seed, t);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::size_t j = sample_index(cdf, uni(rng));
    const Eigen::VectorXd y = sample_outcome(model, j, rng);
    const GridPosterior p = posterior_on_grid(model, prior, y);
    post_var[t] = p.variance;
    sq_err[t] = (p.mean - prior.grid()[j]) * (p.mean - prior.grid()[j]);
  });
  return summarize(post_var, sq_err, options.batches);
}

McResult whitening_projection_bmse(const ToeplitzSymbol& symbol, const DiscretePrior& prior,
                                   const McOptions& options) {
  if (options.trials < 100) throw Error(ErrorCode::InvalidArgument, "at least 100 trials are required");
  const double width = prior.upper() - prior.lower() + prior.spacing();
  const PeriodicKernel K = periodic_whitening_kernel(symbol, 2.0 * width);
  std::vector<double> kcdf(K.density.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < K.density.size(); ++n) {
    acc += K.density[n];
    kcdf[n] = acc;
  }
  if (!std::isfinite(acc) || !(acc > 0.0)) throw Error(ErrorCode::KernelDivergent, "whitening kernel is not normalizable");
  const auto cdf = prior_cdf(prior);
  const auto& grid = prior.grid();
  std::vector<double> post_var(options.trials);
  std::vector<double> sq_err(options.trials);
  parallel_for(options.trials, options.threads, [&](std::size_t t) {
    auto rng = trial_rng(options.seed, t);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::size_t j = sample_index(cdf, uni(rng));
    const std::size_t cell = sample_index(kcdf, uni(rng));
    const double x = grid[j] + (static_cast<double>(cell) + uni(rng)) * K.step();
    Eigen::VectorXd ll(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = K.at(x - grid[i]);
      ll(static_cast<Eigen::Index>(i)) = v > 0.0 ? std::log(v) : kLogZero;
    }
    const GridPosterior p = posterior_from_log_likelihood(prior, ll);
    post_var[t] = p.variance;
    sq_err[t] = (p.mean - grid[j]) * (p.mean - grid[j]);
  });
  return summarize(post_var, sq_err, options.batches);
}

}  // namespace bql
