#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "bql/geometry.hpp"

namespace bql {

/** Truncated eigendecomposition G ≈ U diag(S) U^dagger. */
struct WaveformBasis {
  Eigen::MatrixXcd U;
  Eigen::VectorXd S;
  double tau = 0.0;
  std::vector<double> grid;
  /** sqrt of the sum of squared discarded eigenvalues. */
  double discarded_norm = 0.0;
  double largest_eigenvalue = 0.0;

  Eigen::Index rank() const { return S.size(); }
  Eigen::Index size() const { return U.rows(); }
};

/**
 * Keeps eigenvalues above relative_tau * (largest eigenvalue), in descending
 * order. The largest-magnitude entry of every eigenvector is made real and
 * positive so repeated runs give identical bases. Throws RankZero.
 */
WaveformBasis truncated_basis(const GramMatrix& G, double relative_tau = 1e-8);

/** Row j holds the coefficients of |h_j> in the orthonormal basis: conj(U) sqrt(S). */
Eigen::MatrixXcd state_coefficients(const WaveformBasis& basis);

/** max |G - C C^dagger| over entries. */
double reconstruction_error(const GramMatrix& G, const WaveformBasis& basis);

/** Sample times of M bins of width dt: left endpoints starting at the window start (or centred on t0 for pulses). */
std::vector<double> bin_times(const SignalFamily& signal, std::size_t M, double dt);

/** alpha_j(theta) = i sqrt(dt/2) h_theta(t_j); one row per grid point. */
Eigen::MatrixXcd bin_amplitudes(const EstimationProblem& problem, std::size_t M, double dt);

struct FockOracleConfig {
  std::size_t M = 3;
  std::size_t d = 8;
  double dt = 0.1;
  std::size_t memory_cap = std::size_t{1} << 20;
  double max_defect = 1e-6;
};

/** Explicit truncated product-coherent vectors, one column per grid point. */
struct FockStates {
  Eigen::MatrixXcd vectors;
  /** 1 - (norm before renormalization)^2 for each state. */
  std::vector<double> defects;
  std::size_t M = 0;
  std::size_t d = 0;

  double max_defect() const;
};

/** Truncated single-mode coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!), n < d. */
Eigen::VectorXcd truncated_coherent(cplx alpha, std::size_t d);

/** States from an amplitude table (rows: grid points, columns: bins). Throws MemoryCap, TruncationInadequate. */
FockStates fock_oracle_states(const Eigen::MatrixXcd& alphas, const FockOracleConfig& config);
FockStates fock_oracle_states(const EstimationProblem& problem, const FockOracleConfig& config);

}  // namespace bql
