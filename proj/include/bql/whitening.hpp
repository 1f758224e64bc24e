#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bql/geometry.hpp"

namespace bql {

struct DivergenceDiagnosis {
  bool dc_atom = false;
  bool edge_discontinuity = false;
  std::vector<double> jump_locations;

  bool divergent() const { return dc_atom || edge_discontinuity; }
  /** "None", "DCAtom", "EdgeDiscontinuity" or "DCAtom+EdgeDiscontinuity". */
  std::string label() const;
};

/** Atom above atom_tolerance, plus interior jumps of g larger than 10x the neighbouring increments. */
DivergenceDiagnosis diagnose(const SpectralMeasure& g, double atom_tolerance = 1e-6);

/** Flat-prior MBMSE (1/4) integral g'^2/g, or +inf when divergent. */
struct FlatPriorMbmse {
  double value = 0.0;
  DivergenceDiagnosis diagnosis;
  double spacing = 0.0;
  int refinements = 0;

  bool divergent() const { return diagnosis.divergent(); }
};

/** Evaluated as integral ((sqrt g)')^2 dk on the given grid. */
FlatPriorMbmse mbmse_flat_prior(const SpectralMeasure& g);

/** Rebuilds the measure with halved dk until the value changes by less than rel_change. */
FlatPriorMbmse mbmse_flat_prior(const ToeplitzSymbol& symbol, const std::vector<double>& k_grid,
                                double rel_change = 5e-3, int max_refinements = 6);

/** Likelihood of the covariant measurement as a function of lag theta - theta'. */
struct WhiteningKernel {
  std::vector<double> lag;
  std::vector<double> density;
  /** Integral of the density over the lag window. */
  double normalization = 0.0;
};

/** density(lag) = (1/2pi) |integral sqrt(g(k)) exp(i k lag) dk|^2; the DC atom is excluded. */
WhiteningKernel whitening_likelihood(const SpectralMeasure& g, const std::vector<double>& lags);

/** Symmetric lag grid wide enough for the kernel of g: 32 kernel widths, resolved below the k-grid alias period. */
std::vector<double> default_lags(const SpectralMeasure& g, std::size_t points = 4001);

struct PosteriorVariance {
  double value = 0.0;
  bool divergent = false;
  /** Variance on the windows L/4, L/2, L. */
  std::vector<double> by_window;
};

/** Second central moment of the kernel; divergent if it grows by > 5% from the half to the full window. */
PosteriorVariance whitening_posterior_variance(const WhiteningKernel& kernel);

/**
 * Kernel of the covariant measurement for the symbol restricted to a period P:
 * g_m are the Fourier coefficients of G on [-P/2, P/2) and
 * density(x) = |sum_m sqrt(g_m) exp(2 pi i m x / P)|^2 / P.
 */
struct PeriodicKernel {
  double period = 0.0;
  /** density[n] is the kernel at lag n P / N, n = 0..N-1. */
  std::vector<double> density;

  double step() const { return period / static_cast<double>(density.size()); }
  /** Linear interpolation at any lag (taken modulo the period). */
  double at(double lag) const;
};

PeriodicKernel periodic_whitening_kernel(const ToeplitzSymbol& symbol, double period, std::size_t samples = 0);

struct FinitePriorRow {
  double width = 0.0;
  double posterior_variance = 0.0;
  double prior_variance = 0.0;
  double ratio = 0.0;
};

/** Posterior to flat-prior variance ratio of the covariant kernel restricted to each prior width. */
std::vector<FinitePriorRow> finite_prior_ratio(const ToeplitzSymbol& symbol, const std::vector<double>& widths);

/** Prior widths spanning the given number of decades above omega_lo: omega_lo (10^d - 1). */
double decade_width(double decades, double omega_lo);

enum class CirculantCost { SquaredError, HolevoVariance };

struct CirculantWhitening {
  std::vector<double> lag;
  std::vector<double> density;
  double cost = 0.0;
  double normalization = 0.0;
};

/** Kernel (1/2pi)|sum_k sqrt(g_k) e^{i lag k}|^2 on (-pi, pi] and its flat-prior average cost. Throws NotNormalized. */
CirculantWhitening circulant_whitening(const DiscreteSpectralMeasure& g, CirculantCost cost,
                                       std::size_t samples = 4096);

/** W_kl = i (-1)^(k-l) / (k-l) on the integer support, zero diagonal. */
Eigen::MatrixXcd covariant_operator_coeffs(const std::vector<int>& support);

struct WhitenedModes {
  /** Rows: whitened modes z_j sampled like the input. */
  Eigen::MatrixXcd modes;
  /** Eigenvalues n g_m of the circulant overlap matrix, in DFT order. */
  Eigen::VectorXd spectrum;
};

/**
 * Whitens modes sampled on a uniform parameter grid (rows) and time grid
 * (columns, step dt): DFT over the parameter, division by sqrt of the
 * spectral weight, inverse DFT. Throws SingularMeasure when most weights vanish.
 */
WhitenedModes classical_whiten_modes(const Eigen::MatrixXcd& modes, double dt);

}  // namespace bql
