#include "bql/bayes.hpp"

#include <cmath>

#include "bql/error.hpp"

namespace bql {

namespace {

void check_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::GridMismatch, "basis and prior grids differ in size");
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-9 * std::max(scale, 1.0)) {
      throw Error(ErrorCode::GridMismatch, "basis and prior grids differ at index " + std::to_string(i));
    }
  }
}

}  // namespace

MixedState mixed_state(const Eigen::MatrixXcd& states, const DiscretePrior& prior) {
  if (static_cast<std::size_t>(states.cols()) != prior.size()) {
    throw Error(ErrorCode::GridMismatch, "state count does not match the prior grid");
  }
  const auto n = static_cast<Eigen::Index>(prior.size());
  Eigen::VectorXd p(n);
  Eigen::VectorXd pt(n);
  const auto centred = prior.centered_grid();
  for (Eigen::Index j = 0; j < n; ++j) {
    p(j) = prior.probability(static_cast<std::size_t>(j));
    pt(j) = p(j) * centred[static_cast<std::size_t>(j)];
  }
  MixedState m;
  m.rho = states * p.asDiagonal() * states.adjoint();
  m.drho = states * pt.asDiagonal() * states.adjoint();
  return m;
}

MixedState mixed_state(const WaveformBasis& basis, const DiscretePrior& prior) {
  check_grid(basis.grid, prior.grid());
  return mixed_state(Eigen::MatrixXcd(state_coefficients(basis).transpose()), prior);
}

BayesSolution bsld_mbmse(const MixedState& state, double prior_variance, double eps_rel) {
  BayesSolution s;
  s.rho = 0.5 * (state.rho + state.rho.adjoint());
  s.drho = 0.5 * (state.drho + state.drho.adjoint());
  s.prior_variance = prior_variance;
  const double tr = s.rho.trace().real();
  s.trace_defect = std::abs(tr - 1.0);
  s.epsilon = eps_rel * tr;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.rho);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::MatrixXcd& V = es.eigenvectors();
  s.rho_eigenvalues = lam;
  const Eigen::Index r = lam.size();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (lam(j) > 0.5 * s.epsilon) ++s.retained;
  }
  if (s.retained == 0) throw Error(ErrorCode::DegenerateState, "mixed state has no eigenvalue above tolerance");

  const Eigen::MatrixXcd P = V.adjoint() * s.drho * V;
  Eigen::MatrixXcd Lt = Eigen::MatrixXcd::Zero(r, r);
  double gain = 0.0;
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index k = 0; k < r; ++k) {
      const double sum = lam(j) + lam(k);
      if (sum <= s.epsilon) continue;
      Lt(j, k) = 2.0 * P(j, k) / sum;
      gain += 4.0 * lam(j) / (sum * sum) * std::norm(P(j, k));
    }
  }
  s.L = V * Lt * V.adjoint();
  s.L = 0.5 * (s.L + s.L.adjoint()).eval();
  s.mbmse = prior_variance - gain;
  s.mbmse_trace_route = prior_variance - (s.rho * s.L * s.L).trace().real();

  Eigen::MatrixXcd Vr(r, s.retained);
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < r; ++j) {
    if (lam(j) > 0.5 * s.epsilon) Vr.col(c++) = V.col(j);
  }
  const Eigen::MatrixXcd R = s.drho - 0.5 * (s.rho * s.L + s.L * s.rho);
  s.lyapunov_residual = (Vr.adjoint() * R * Vr).cwiseAbs().maxCoeff();
  return s;
}

OptimalMeasurement optimal_measurement(const BayesSolution& solution, const WaveformBasis& basis) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(solution.L);
  OptimalMeasurement m;
  m.estimates = es.eigenvalues();
  m.vectors = es.eigenvectors();
  m.grid_coefficients = basis.U * basis.S.cwiseSqrt().cwiseInverse().asDiagonal() * m.vectors;
  return m;
}

Eigen::MatrixXd outcome_probabilities(const OptimalMeasurement& m, const WaveformBasis& basis) {
  const Eigen::MatrixXcd states = state_coefficients(basis).transpose();
  return (m.vectors.adjoint() * states).cwiseAbs2();
}

DisplacementToy displacement_toy(double sigma, ToyScheme scheme) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "prior width must be positive");
  const double s2 = sigma * sigma;
  DisplacementToy t;
  switch (scheme) {
    case ToyScheme::Quadrature:
    case ToyScheme::Optimal:
      t.bmse = s2 / (1.0 + 2.0 * s2);
      t.posterior_mean_factor = 2.0 * s2 / (1.0 + 2.0 * s2);
      t.posterior_variance = t.bmse;
      break;
    case ToyScheme::NumberResolving:
      t.bmse = s2;
      t.posterior_mean_factor = 0.0;
      t.posterior_variance = s2;
      break;
  }
  return t;
}

PipelineResult solve_problem(const EstimationProblem& problem, double relative_tau, double eps_rel) {
  const GramMatrix G = gram_matrix(problem);
  PipelineResult r;
  r.basis = truncated_basis(G, relative_tau);
  r.reconstruction_error = reconstruction_error(G, r.basis);
  r.solution = bsld_mbmse(mixed_state(r.basis, problem.prior), problem.prior.variance(), eps_rel);
  return r;
}

BayesSolution full_space_solution(const Eigen::MatrixXcd& states, const DiscretePrior& prior, double eps_rel) {
  if (states.rows() <= 4096) return bsld_mbmse(mixed_state(states, prior), prior.variance(), eps_rel);
  if (static_cast<std::size_t>(states.cols()) != prior.size()) {
    throw Error(ErrorCode::GridMismatch, "state count does not match the prior grid");
  }
  const auto n = states.cols();
  Eigen::VectorXd sp(n);
  for (Eigen::Index j = 0; j < n; ++j) sp(j) = std::sqrt(prior.probability(static_cast<std::size_t>(j)));
  const Eigen::MatrixXcd B = states * sp.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeThinU);
  const Eigen::MatrixXcd Q = svd.matrixU();
  const Eigen::MatrixXcd reduced = Q.adjoint() * states;
  return bsld_mbmse(mixed_state(reduced, prior), prior.variance(), eps_rel);
}

}  // namespace bql
