#include "bql/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bql/error.hpp"

namespace bql {

WaveformBasis truncated_basis(const GramMatrix& G, double relative_tau) {
  const Eigen::MatrixXcd H = 0.5 * (G.entries + G.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "Gram eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::Index n = lam.size();
  const double top = n > 0 ? lam(n - 1) : 0.0;
  if (!(top > 0.0)) throw Error(ErrorCode::RankZero, "Gram matrix has no positive eigenvalue");
  const double tau = relative_tau * top;

  std::vector<Eigen::Index> keep;
  double discarded = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (lam(i) > tau) {
      keep.push_back(i);
    } else {
      discarded += lam(i) * lam(i);
    }
  }
  if (keep.empty()) throw Error(ErrorCode::RankZero, "all eigenvalues are below the threshold");

  WaveformBasis b;
  b.tau = tau;
  b.grid = G.grid;
  b.largest_eigenvalue = top;
  b.discarded_norm = std::sqrt(discarded);
  const auto r = static_cast<Eigen::Index>(keep.size());
  b.U.resize(n, r);
  b.S.resize(r);
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::VectorXcd v = es.eigenvectors().col(keep[static_cast<std::size_t>(c)]);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(v(i));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        arg = i;
      }
    }
    v *= std::conj(v(arg)) / std::abs(v(arg));
    v(arg) = std::abs(v(arg));
    b.U.col(c) = v;
    b.S(c) = lam(keep[static_cast<std::size_t>(c)]);
  }
  return b;
}

Eigen::MatrixXcd state_coefficients(const WaveformBasis& basis) {
  return basis.U.conjugate() * basis.S.cwiseSqrt().asDiagonal();
}

double reconstruction_error(const GramMatrix& G, const WaveformBasis& basis) {
  const Eigen::MatrixXcd C = state_coefficients(basis);
  const Eigen::MatrixXcd R = (C.conjugate() * C.transpose()).eval();
  return (G.entries - R).cwiseAbs().maxCoeff();
}

std::vector<double> bin_times(const SignalFamily& signal, std::size_t M, double dt) {
  if (M == 0 || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "need at least one bin and dt > 0");
  double start = 0.0;
  switch (signal.kind) {
    case SignalKind::WindowedSinusoid:
    case SignalKind::ComplexExponential: start = signal.window_start(); break;
    case SignalKind::SineGaussian:
    case SignalKind::LorentzianDecay: start = signal.t0 - 0.5 * dt * static_cast<double>(M - 1); break;
    case SignalKind::ScaledTemplate:
    case SignalKind::PhaseRotated: start = signal.template_start; break;
  }
  std::vector<double> t(M);
  for (std::size_t j = 0; j < M; ++j) t[j] = start + dt * static_cast<double>(j);
  return t;
}

Eigen::MatrixXcd bin_amplitudes(const EstimationProblem& problem, std::size_t M, double dt) {
  const auto t = bin_times(problem.signal, M, dt);
  const auto& grid = problem.grid();
  const cplx scale(0.0, std::sqrt(0.5 * dt));
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(M));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          scale * evaluate(problem.signal, problem.parameter, grid[i], t[j]);
    }
  }
  return a;
}

double FockStates::max_defect() const {
  return defects.empty() ? 0.0 : *std::max_element(defects.begin(), defects.end());
}

Eigen::VectorXcd truncated_coherent(cplx alpha, std::size_t d) {
  Eigen::VectorXcd c(static_cast<Eigen::Index>(d));
  cplx term = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n < d; ++n) {
    if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
    c(static_cast<Eigen::Index>(n)) = term;
  }
  return c;
}

FockStates fock_oracle_states(const Eigen::MatrixXcd& alphas, const FockOracleConfig& config) {
  const auto M = static_cast<std::size_t>(alphas.cols());
  const std::size_t d = config.d;
  if (M == 0 || d < 1) throw Error(ErrorCode::InvalidArgument, "oracle needs at least one bin and d >= 1");
  double dim = std::pow(static_cast<double>(d), static_cast<double>(M));
  if (dim > static_cast<double>(config.memory_cap)) {
    throw Error(ErrorCode::MemoryCap, "d^M = " + std::to_string(dim) + " exceeds the memory cap");
  }
  const auto D = static_cast<Eigen::Index>(dim);
  FockStates out;
  out.M = M;
  out.d = d;
  out.vectors.resize(D, alphas.rows());
  out.defects.resize(static_cast<std::size_t>(alphas.rows()));
  for (Eigen::Index s = 0; s < alphas.rows(); ++s) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    for (std::size_t j = 0; j < M; ++j) {
      const Eigen::VectorXcd c = truncated_coherent(alphas(s, static_cast<Eigen::Index>(j)), d);
      Eigen::VectorXcd next(v.size() * c.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * c.size(), c.size()) = v(i) * c;
      v.swap(next);
    }
    const double norm_sq = v.squaredNorm();
    const double defect = 1.0 - norm_sq;
    out.defects[static_cast<std::size_t>(s)] = defect;
    if (defect > config.max_defect) {
      throw Error(ErrorCode::TruncationInadequate,
                  "Fock truncation defect " + std::to_string(defect) + " exceeds " + std::to_string(config.max_defect));
    }
    out.vectors.col(s) = v / std::sqrt(norm_sq);
  }
  return out;
}

FockStates fock_oracle_states(const EstimationProblem& problem, const FockOracleConfig& config) {
  return fock_oracle_states(bin_amplitudes(problem, config.M, config.dt), config);
}

}  // namespace bql
