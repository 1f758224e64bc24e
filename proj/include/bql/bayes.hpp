#pragma once

#include <Eigen/Dense>

#include "bql/prior.hpp"
#include "bql/subspace.hpp"

namespace bql {

/** Prior-averaged state and its first moment in the parameter. */
struct MixedState {
  Eigen::MatrixXcd rho;
  Eigen::MatrixXcd drho;
};

/**
 * rho = sum_j p_j |psi_j><psi_j|, drho = sum_j p_j (theta_j - mean) |psi_j><psi_j|.
 * states holds one state vector per column, ordered like the prior grid.
 */
MixedState mixed_state(const Eigen::MatrixXcd& states, const DiscretePrior& prior);
/** Same, with the states expressed in the waveform basis. Throws GridMismatch. */
MixedState mixed_state(const WaveformBasis& basis, const DiscretePrior& prior);

struct BayesSolution {
  Eigen::MatrixXcd rho;
  Eigen::MatrixXcd drho;
  Eigen::MatrixXcd L;
  Eigen::VectorXd rho_eigenvalues;
  double prior_variance = 0.0;
  double mbmse = 0.0;
  /** prior variance - tr(rho L^2). */
  double mbmse_trace_route = 0.0;
  double epsilon = 0.0;
  double lyapunov_residual = 0.0;
  double trace_defect = 0.0;
  /** Number of eigenvalues of rho above epsilon / 2. */
  Eigen::Index retained = 0;
};

/** Solves rho' = (rho L + L rho)/2 in the eigenbasis of rho, dropping pairs with eigenvalue sum <= eps_rel tr rho. */
BayesSolution bsld_mbmse(const MixedState& state, double prior_variance, double eps_rel = 1e-12);

/** Projective measurement in the eigenbasis of L. */
struct OptimalMeasurement {
  /** Eigenvalues of L, ascending: the estimate reported for each outcome. */
  Eigen::VectorXd estimates;
  /** Columns: measurement vectors in the orthonormal basis. */
  Eigen::MatrixXcd vectors;
  /** Columns: the same vectors as superpositions of the grid states. */
  Eigen::MatrixXcd grid_coefficients;
};

OptimalMeasurement optimal_measurement(const BayesSolution& solution, const WaveformBasis& basis);

/** Outcome probabilities |<x_i|psi_j>|^2 for each grid state (rows: outcomes, columns: states). */
Eigen::MatrixXd outcome_probabilities(const OptimalMeasurement& m, const WaveformBasis& basis);

enum class ToyScheme { Quadrature, NumberResolving, Optimal };

/** Closed-form results for one displaced vacuum mode with a Gaussian prior of width sigma. */
struct DisplacementToy {
  double bmse = 0.0;
  /** Posterior mean = factor * outcome. */
  double posterior_mean_factor = 0.0;
  double posterior_variance = 0.0;
};

DisplacementToy displacement_toy(double sigma, ToyScheme scheme);

/** Gram matrix, truncated basis and Bayesian solution for one problem. */
struct PipelineResult {
  WaveformBasis basis;
  BayesSolution solution;
  double reconstruction_error = 0.0;
};

PipelineResult solve_problem(const EstimationProblem& problem, double relative_tau = 1e-8, double eps_rel = 1e-12);

/** Full-space solution from explicit state vectors (dense for dimension <= 4096, otherwise via a thin SVD). */
BayesSolution full_space_solution(const Eigen::MatrixXcd& states, const DiscretePrior& prior,
                                  double eps_rel = 1e-12);

}  // namespace bql
