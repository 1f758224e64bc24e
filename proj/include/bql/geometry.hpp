#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bql/signals.hpp"

namespace bql {

/** Matrix of state overlaps <psi_j|psi_k> on a parameter grid. */
struct GramMatrix {
  Eigen::MatrixXcd entries;
  std::vector<double> grid;
  Encoding encoding = Encoding::Coherent;
  Exactness exactness = Exactness::Exact;

  Eigen::Index size() const { return entries.rows(); }
};

struct GramCheck {
  double hermitian_defect = 0.0;
  double diagonal_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool ok = false;
};

/** Hermitian to 1e-12, unit diagonal to 1e-12, smallest eigenvalue >= -1e-9 n. */
GramCheck check_gram(const GramMatrix& G);

/** <psi_a|psi_b> for the problem's encoding and exactness. */
cplx state_overlap(const EstimationProblem& problem, double a, double b);

GramMatrix gram_coherent(const EstimationProblem& problem);
GramMatrix gram_single_particle(const EstimationProblem& problem);
/** Dispatches on problem.encoding. */
GramMatrix gram_matrix(const EstimationProblem& problem);

/**
 * Lag function G with <psi_theta|psi_theta'> = G(theta - theta').
 *
 * lag_scale is a characteristic overlap-decay length used for default
 * sampling; asymptote is G at infinite lag when known; period is set for
 * periodic (circulant) families.
 */
struct ToeplitzSymbol {
  std::function<cplx(double)> G;
  double lag_scale = 1.0;
  std::optional<cplx> asymptote;
  std::optional<double> period;
  std::string name;

  cplx operator()(double lag) const { return G(lag); }
};

/** Symbol of the problem; throws NotToeplitz if its Gram matrix is not a lag function. */
ToeplitzSymbol symbol_from_problem(const EstimationProblem& problem, double tolerance = 1e-9);

/** exp(-(A^2 T/4)(1 - sinc(theta T))): frequency symbol of the sinusoid on (0, T), many cycles. */
ToeplitzSymbol frequency_symbol(double A, double T);

struct ToeplitzDefect {
  double toeplitz = 0.0;
  double circulant = 0.0;
};

/** Largest entry spread along (cyclic) diagonals; throws NonUniformGrid. */
ToeplitzDefect toeplitz_defect(const GramMatrix& G);

struct SpectralOptions {
  /** Lag sample step; 0 selects pi / (4 max|k|). */
  double lag_step = 0.0;
  /** Gaussian lag taper width; 0 selects 40 / dk. */
  double taper_width = 0.0;
  /** Half-width of the lag window; 0 selects max(8 taper_width, 40 lag_scale). */
  double lag_half_width = 0.0;
  double tail_tolerance = 1e-6;
  double negative_tolerance = 1e-9;
};

/** Spectral density g(k) on a uniform k grid plus a DC atom. */
struct SpectralMeasure {
  std::vector<double> k;
  std::vector<double> g;
  double dc_atom = 0.0;
  std::vector<bool> support;
  double normalization_defect = 0.0;
  double min_before_clip = 0.0;
  double taper_width = 0.0;
  double lag_half_width = 0.0;

  double spacing() const { return k.size() > 1 ? k[1] - k[0] : 0.0; }
  /** Continuous mass by the trapezoid rule. */
  double continuous_mass() const;
  /** Mean and variance of g including the atom at k = 0. */
  double mean() const;
  double variance() const;
};

/**
 * g(k) = (1/2pi) integral exp(-ik theta) G(theta) d theta.
 *
 * The constant tail G(inf) is removed before transforming and reported as
 * dc_atom. The remainder is multiplied by a Gaussian lag taper much wider
 * than 1/dk, which keeps the estimate nonnegative for valid symbols; the
 * result is the density convolved with a Gaussian of width 1/taper_width.
 */
SpectralMeasure spectral_measure(const ToeplitzSymbol& symbol, const std::vector<double>& k_grid,
                                 const SpectralOptions& options = {});

/** Integer-indexed weights g_k of a 2 pi periodic symbol. */
struct DiscreteSpectralMeasure {
  int k_min = 0;
  std::vector<double> g;
  double min_before_clip = 0.0;

  int k_max() const { return k_min + static_cast<int>(g.size()) - 1; }
  double at(int k) const;
  double total() const;
  double mean() const;
  double variance() const;
};

DiscreteSpectralMeasure discrete_spectral_measure(const ToeplitzSymbol& symbol, std::size_t samples = 0);

/** Leading terms of g(k) for the frequency symbol at low A^2 T. */
struct LowSnrTerms {
  double atom = 1.0;
  double rectangle_height = 0.0;
  double rectangle_half_width = 0.0;
  double triangle_slope = 0.0;
  double triangle_half_width = 0.0;

  double density(double k) const;
  /** atom + integrals of the rectangle and triangle. */
  double total_mass() const;
};

LowSnrTerms low_snr_spectral_terms(double A, double T, int order = 2);

enum class FidelityStencil { Forward, Central };

using OverlapFunction = std::function<cplx(double, double)>;

/**
 * QFI from 4(1 - |<psi_theta|psi_theta+step>|^2)/step^2.
 * Throws StepTooLarge when halving the step changes the estimate by > 10%.
 */
double qfi_from_fidelity(const OverlapFunction& overlap, double theta, double step,
                         FidelityStencil stencil = FidelityStencil::Central);
double qfi_from_fidelity(const ToeplitzSymbol& symbol, double step,
                         FidelityStencil stencil = FidelityStencil::Central);
double qfi_from_fidelity(const EstimationProblem& problem, double theta, double step,
                         FidelityStencil stencil = FidelityStencil::Central);

}  // namespace bql
