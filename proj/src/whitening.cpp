#include "bql/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "bql/error.hpp"

namespace bql {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

double moment_variance(const std::vector<double>& x, const std::vector<double>& w, double half_width) {
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > half_width) continue;
    m0 += w[i];
    m1 += w[i] * x[i];
  }
  if (!(m0 > 0.0)) return 0.0;
  const double mean = m1 / m0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > half_width) continue;
    m2 += w[i] * (x[i] - mean) * (x[i] - mean);
  }
  return m2 / m0;
}

}  // namespace

std::string DivergenceDiagnosis::label() const {
  if (dc_atom && edge_discontinuity) return "DCAtom+EdgeDiscontinuity";
  if (dc_atom) return "DCAtom";
  if (edge_discontinuity) return "EdgeDiscontinuity";
  return "None";
}

DivergenceDiagnosis diagnose(const SpectralMeasure& g, double atom_tolerance) {
  DivergenceDiagnosis d;
  d.dc_atom = g.dc_atom > atom_tolerance;
  const auto& v = g.g;
  const std::size_t n = v.size();
  double gmax = 0.0;
  for (double x : v) gmax = std::max(gmax, x);
  const double floor = 1e-4 * gmax + 1e-12;
  std::size_t last = 0;
  // A jump can straddle a grid point, so spans of one and two cells are tested.
  for (std::size_t i = 1; i + 3 < n; ++i) {
    for (std::size_t w = 1; w <= 2; ++w) {
      const double jump = std::abs(v[i + w] - v[i]);
      const double before = std::abs(v[i] - v[i - 1]);
      const double after = std::abs(v[i + w + 1] - v[i + w]);
      if (jump > floor && jump > 10.0 * std::max(before, after)) {
        if (last == 0 || i > last + 2) {
          d.jump_locations.push_back(0.5 * (g.k[i] + g.k[i + w]));
          last = i;
        }
        break;
      }
    }
  }
  d.edge_discontinuity = !d.jump_locations.empty();
  return d;
}

FlatPriorMbmse mbmse_flat_prior(const SpectralMeasure& g) {
  FlatPriorMbmse r;
  r.diagnosis = diagnose(g);
  r.spacing = g.spacing();
  if (r.diagnosis.divergent()) {
    r.value = std::numeric_limits<double>::infinity();
    return r;
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < g.g.size(); ++i) {
    const double d = std::sqrt(g.g[i + 1]) - std::sqrt(g.g[i]);
    total += d * d;
  }
  r.value = total / r.spacing;
  return r;
}

FlatPriorMbmse mbmse_flat_prior(const ToeplitzSymbol& symbol, const std::vector<double>& k_grid, double rel_change,
                                int max_refinements) {
  std::vector<double> grid = k_grid;
  FlatPriorMbmse prev = mbmse_flat_prior(spectral_measure(symbol, grid));
  for (int it = 1; it <= max_refinements; ++it) {
    if (prev.divergent()) return prev;
    grid = linspace(grid.front(), grid.back(), 2 * grid.size() - 1);
    FlatPriorMbmse next = mbmse_flat_prior(spectral_measure(symbol, grid));
    next.refinements = it;
    if (next.divergent() || std::abs(next.value - prev.value) <= rel_change * std::abs(next.value)) return next;
    prev = next;
  }
  return prev;
}

WhiteningKernel whitening_likelihood(const SpectralMeasure& g, const std::vector<double>& lags) {
  WhiteningKernel K;
  K.lag = lags;
  K.density.resize(lags.size());
  const double dk = g.spacing();
  std::vector<double> amp(g.g.size());
  for (std::size_t i = 0; i < amp.size(); ++i) {
    amp[i] = std::sqrt(g.g[i]) * dk * ((i == 0 || i + 1 == amp.size()) ? 0.5 : 1.0);
  }
  for (std::size_t j = 0; j < lags.size(); ++j) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
      if (amp[i] != 0.0) s += amp[i] * std::polar(1.0, g.k[i] * lags[j]);
    }
    K.density[j] = std::norm(s) / (2.0 * kPi);
  }
  if (lags.size() > 1) {
    for (std::size_t j = 0; j + 1 < lags.size(); ++j) {
      K.normalization += 0.5 * (K.density[j] + K.density[j + 1]) * (lags[j + 1] - lags[j]);
    }
  }
  return K;
}

std::vector<double> default_lags(const SpectralMeasure& g, std::size_t points) {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < g.g.size(); ++i) {
    m0 += g.g[i];
    m1 += g.g[i] * g.k[i];
    m2 += g.g[i] * g.k[i] * g.k[i];
  }
  double spread = 1.0;
  if (m0 > 0.0) spread = std::sqrt(std::max(m2 / m0 - (m1 / m0) * (m1 / m0), 0.0));
  double half = 32.0 / (2.0 * std::max(spread, 1e-12));
  half = std::min(half, 0.9 * kPi / g.spacing());
  return linspace(-half, half, points);
}

PosteriorVariance whitening_posterior_variance(const WhiteningKernel& kernel) {
  PosteriorVariance p;
  double L = 0.0;
  for (double x : kernel.lag) L = std::max(L, std::abs(x));
  for (double f : {0.25, 0.5, 1.0}) p.by_window.push_back(moment_variance(kernel.lag, kernel.density, f * L));
  p.value = p.by_window.back();
  const double half = p.by_window[1];
  p.divergent = p.value > 1.05 * half + 1e-300;
  if (p.divergent) p.value = std::numeric_limits<double>::infinity();
  return p;
}

double PeriodicKernel::at(double lag) const {
  const auto N = static_cast<double>(density.size());
  double u = std::fmod(lag, period);
  if (u < 0.0) u += period;
  u = u / period * N;
  const auto i = static_cast<std::size_t>(std::floor(u)) % density.size();
  const double f = u - std::floor(u);
  return (1.0 - f) * density[i] + f * density[(i + 1) % density.size()];
}

PeriodicKernel periodic_whitening_kernel(const ToeplitzSymbol& symbol, double period, std::size_t samples) {
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  std::size_t N = samples;
  if (N == 0) N = std::max<std::size_t>(4096, next_pow2(16.0 * period / symbol.lag_scale));
  const double step = period / static_cast<double>(N);
  std::vector<cplx> x(N);
  const auto half = static_cast<long>(N / 2);
  for (long j = -half; j < half; ++j) {
    x[static_cast<std::size_t>((j + static_cast<long>(N)) % static_cast<long>(N))] = symbol(static_cast<double>(j) * step);
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> coeffs;
  fft.fwd(coeffs, x);
  for (auto& c : coeffs) c = std::sqrt(std::max(std::real(c) / static_cast<double>(N), 0.0));
  std::vector<cplx> amp;
  fft.inv(amp, coeffs);
  PeriodicKernel K;
  K.period = period;
  K.density.resize(N);
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    K.density[n] = std::norm(amp[n] * static_cast<double>(N)) / period;
    total += K.density[n] * step;
  }
  for (double& v : K.density) v /= total;
  return K;
}

std::vector<FinitePriorRow> finite_prior_ratio(const ToeplitzSymbol& symbol, const std::vector<double>& widths) {
  std::vector<FinitePriorRow> rows;
  for (double width : widths) {
    const PeriodicKernel K = periodic_whitening_kernel(symbol, width);
    const std::size_t N = K.density.size();
    const double step = K.step();
    double m0 = 0.0;
    double m2 = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double lag = (n < N / 2 ? static_cast<double>(n) : static_cast<double>(n) - static_cast<double>(N)) * step;
      m0 += K.density[n];
      m2 += K.density[n] * lag * lag;
    }
    FinitePriorRow r;
    r.width = width;
    r.posterior_variance = m2 / m0;
    r.prior_variance = width * width / 12.0;
    r.ratio = r.posterior_variance / r.prior_variance;
    rows.push_back(r);
  }
  return rows;
}

double decade_width(double decades, double omega_lo) { return omega_lo * (std::pow(10.0, decades) - 1.0); }

CirculantWhitening circulant_whitening(const DiscreteSpectralMeasure& g, CirculantCost cost, std::size_t samples) {
  const double total = g.total();
  if (std::abs(total - 1.0) > 1e-6) {
    throw Error(ErrorCode::NotNormalized, "discrete spectral weights sum to " + std::to_string(total));
  }
  CirculantWhitening w;
  w.lag.resize(samples);
  w.density.resize(samples);
  const double step = 2.0 * kPi / static_cast<double>(samples);
  for (std::size_t n = 0; n < samples; ++n) {
    const double lag = -kPi + step * (static_cast<double>(n) + 1.0);
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.g.size(); ++i) {
      if (g.g[i] > 0.0) s += std::sqrt(g.g[i]) * std::polar(1.0, lag * (g.k_min + static_cast<int>(i)));
    }
    w.lag[n] = lag;
    w.density[n] = std::norm(s) / (2.0 * kPi);
    w.normalization += w.density[n] * step;
    const double c = cost == CirculantCost::SquaredError ? lag * lag : 4.0 * std::pow(std::sin(0.5 * lag), 2);
    w.cost += c * w.density[n] * step;
  }
  return w;
}

Eigen::MatrixXcd covariant_operator_coeffs(const std::vector<int>& support) {
  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const int diff = support[static_cast<std::size_t>(a)] - support[static_cast<std::size_t>(b)];
      if (diff == 0) continue;
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      W(a, b) = cplx(0.0, sign / diff);
    }
  }
  return W;
}

WhitenedModes classical_whiten_modes(const Eigen::MatrixXcd& modes, double dt) {
  const Eigen::Index n = modes.rows();
  Eigen::MatrixXcd F(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index j = 0; j < n; ++j) {
      F(m, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                           -2.0 * kPi * static_cast<double>(m * j) / static_cast<double>(n));
    }
  }
  Eigen::MatrixXcd Y = F * modes;
  WhitenedModes out;
  out.spectrum.resize(n);
  double top = 0.0;
  for (Eigen::Index m = 0; m < n; ++m) {
    out.spectrum(m) = Y.row(m).squaredNorm() * dt;
    top = std::max(top, out.spectrum(m));
  }
  Eigen::Index vanishing = 0;
  for (Eigen::Index m = 0; m < n; ++m) {
    if (out.spectrum(m) > 1e-12 * top) {
      Y.row(m) /= std::sqrt(out.spectrum(m));
    } else {
      Y.row(m).setZero();
      ++vanishing;
    }
  }
  if (!(top > 0.0) || 2 * vanishing > n) {
    throw Error(ErrorCode::SingularMeasure, "spectral weight vanishes on most of the grid");
  }
  out.modes = F.adjoint() * Y;
  return out;
}

}  // namespace bql
