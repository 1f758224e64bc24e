#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "bql/geometry.hpp"
#include "bql/prior.hpp"
#include "bql/whitening.hpp"

namespace bql {

/** Coherent amplitudes alpha_j(theta) of M time bins, one row per grid point. */
struct DiscretizedBath {
  std::size_t M = 0;
  double dt = 0.0;
  std::vector<double> grid;
  std::vector<double> times;
  Eigen::MatrixXcd alpha;
  /** Prior width times dt (the phase a frequency offset accumulates per bin). */
  double phase_per_bin = 0.0;

  /** sum_j |alpha_j(theta_i)|^2 for grid point i. */
  double total_number(std::size_t i) const;
};

/** Number of closed-window bins for duration T: ceil(T/dt) + 1. */
std::size_t bins_for_duration(double T, double dt);

/** Throws Aliased when a frequency grid reaches pi/dt or its width times dt reaches pi. */
DiscretizedBath discretize(const EstimationProblem& problem, std::size_t M, double dt);
DiscretizedBath bath_from_amplitudes(std::vector<double> grid, Eigen::MatrixXcd alpha, double dt = 1.0);

/** Gram matrix of the product coherent states of the bath. */
GramMatrix gram_discretized(const DiscretizedBath& bath);

enum class SchemeKind { TimeQuadrature, TimeCounting, FourierCounting, WhiteningProjection };
enum class FourierTransform { DFT, DCT };

std::string to_string(SchemeKind kind);

struct MeasurementScheme {
  SchemeKind kind = SchemeKind::TimeQuadrature;
  FourierTransform transform = FourierTransform::DFT;
};

/** Unitary DFT or orthonormal DCT-II matrix of size M. */
Eigen::MatrixXcd mode_transform(FourierTransform transform, std::size_t M);

/** Per-grid-point outcome statistics: quadrature means or Poisson rates. */
struct SchemeModel {
  MeasurementScheme scheme;
  /** Rows: grid points. Quadrature: mean of p_j. Counting: mean count. */
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_rate;
};

/** Throws InvalidArgument for WhiteningProjection, which has no time-bin outcome. */
SchemeModel scheme_model(const DiscretizedBath& bath, const MeasurementScheme& scheme);

Eigen::VectorXd sample_outcome(const SchemeModel& model, std::size_t grid_index, std::mt19937_64& rng);
Eigen::VectorXd sample_outcome(const DiscretizedBath& bath, const MeasurementScheme& scheme, std::size_t grid_index,
                               std::mt19937_64& rng);

/** Log-likelihood of an outcome for every grid point (quadrature noise variance 1/2). */
Eigen::VectorXd log_likelihood(const SchemeModel& model, const Eigen::VectorXd& outcome);

struct GridPosterior {
  std::vector<double> weights;
  double mean = 0.0;
  double variance = 0.0;
};

/** Bayes rule on the grid with max-log stabilization; throws AllZeroPosterior. */
GridPosterior posterior_from_log_likelihood(const DiscretePrior& prior, const Eigen::VectorXd& log_likelihood);
GridPosterior posterior_on_grid(const SchemeModel& model, const DiscretePrior& prior, const Eigen::VectorXd& outcome);

struct McOptions {
  std::size_t trials = 20000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t batches = 20;
};

/** Monte Carlo BMSE with two estimators: mean posterior variance and mean squared error of the posterior mean. */
struct McResult {
  double bmse = 0.0;
  double se = 0.0;
  double squared_error = 0.0;
  double squared_error_se = 0.0;
  std::size_t trials = 0;
};

/** Independent stream for one trial, identical for serial and parallel runs. */
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

McResult bmse_monte_carlo(const DiscretizedBath& bath, const DiscretePrior& prior, const MeasurementScheme& scheme,
                          const McOptions& options);

/**
 * BMSE of the covariant measurement restricted to the prior window: outcomes
 * are drawn from the periodic kernel with period twice the prior width and
 * the posterior is formed on the prior grid.
 */
McResult whitening_projection_bmse(const ToeplitzSymbol& symbol, const DiscretePrior& prior,
                                   const McOptions& options);

}  // namespace bql
