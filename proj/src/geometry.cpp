#include "bql/geometry.hpp"

#include <algorithm>
#include <cmath>
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

bool sinusoid_not_toeplitz(const EstimationProblem& p) {
  return p.signal.kind == SignalKind::WindowedSinusoid && p.exactness == Exactness::Exact &&
         (p.parameter == Parameter::Frequency || p.parameter == Parameter::Phase);
}

double reference_point(const EstimationProblem& p) { return p.prior.mean(); }

double symbol_lag_scale(const EstimationProblem& p, double theta0) {
  const SignalFamily& s = p.signal;
  switch (p.parameter) {
    case Parameter::Frequency:
      switch (s.kind) {
        case SignalKind::SineGaussian: return 1.0 / s.sigma;
        case SignalKind::LorentzianDecay: return s.gamma;
        default: return 2.0 * kPi / s.duration;
      }
    case Parameter::Amplitude: {
      if (p.encoding == Encoding::SingleParticle) return 1.0;
      const double n1 = mean_particle_number(s, Parameter::Amplitude, 1.0, p.exactness);
      return n1 > 0.0 ? 1.0 / std::sqrt(n1) : 1.0;
    }
    case Parameter::PulseCentre: return s.sigma;
    default: (void)theta0; return 1.0;
  }
}

std::optional<cplx> symbol_asymptote(const EstimationProblem& p, double theta0) {
  if (p.parameter == Parameter::Phase) return std::nullopt;
  const bool coherent = p.encoding == Encoding::Coherent;
  switch (p.parameter) {
    case Parameter::Frequency:
    case Parameter::PulseCentre:
      if (!coherent) return cplx(0.0);
      return cplx(std::exp(-mean_particle_number(p.signal, p.parameter, theta0, p.exactness)));
    case Parameter::Amplitude:
    case Parameter::Displacement: return coherent ? cplx(0.0) : cplx(1.0);
    default: return std::nullopt;
  }
}

}  // namespace

GramCheck check_gram(const GramMatrix& G) {
  GramCheck c;
  const Eigen::MatrixXcd& E = G.entries;
  c.hermitian_defect = (E - E.adjoint()).cwiseAbs().maxCoeff();
  c.diagonal_defect = (E.diagonal().array() - 1.0).abs().maxCoeff();
  Eigen::MatrixXcd H = 0.5 * (E + E.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  c.ok = c.hermitian_defect <= 1e-12 && c.diagonal_defect <= 1e-12 &&
         c.min_eigenvalue >= -1e-9 * static_cast<double>(G.size());
  return c;
}

cplx state_overlap(const EstimationProblem& problem, double a, double b) {
  const SignalFamily& s = problem.signal;
  const Parameter p = problem.parameter;
  const Exactness e = problem.exactness;
  const cplx ip = l2_inner_product(s, p, a, b, e);
  if (problem.encoding == Encoding::Coherent) {
    const double na = mean_particle_number(s, p, a, e);
    const double nb = mean_particle_number(s, p, b, e);
    return std::exp(-0.5 * (na + nb) + 0.5 * ip);
  }
  const double na = std::real(l2_inner_product(s, p, a, a, e));
  const double nb = std::real(l2_inner_product(s, p, b, b, e));
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::InvalidArgument, "single-particle mode has zero norm");
  return ip / std::sqrt(na * nb);
}

namespace {

GramMatrix build_gram(const EstimationProblem& problem) {
  problem.validate();
  const auto& grid = problem.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  GramMatrix G;
  G.entries.resize(n, n);
  G.grid = grid;
  G.encoding = problem.encoding;
  G.exactness = problem.exactness;
  for (Eigen::Index j = 0; j < n; ++j) {
    G.entries(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const cplx v = state_overlap(problem, grid[static_cast<std::size_t>(j)], grid[static_cast<std::size_t>(k)]);
      G.entries(j, k) = v;
      G.entries(k, j) = std::conj(v);
    }
  }
  return G;
}

}  // namespace

GramMatrix gram_coherent(const EstimationProblem& problem) {
  if (problem.encoding != Encoding::Coherent) throw Error(ErrorCode::InvalidArgument, "problem is not coherent");
  return build_gram(problem);
}

GramMatrix gram_single_particle(const EstimationProblem& problem) {
  if (problem.encoding != Encoding::SingleParticle) {
    throw Error(ErrorCode::InvalidArgument, "problem is not single-particle");
  }
  return build_gram(problem);
}

GramMatrix gram_matrix(const EstimationProblem& problem) { return build_gram(problem); }

ToeplitzDefect toeplitz_defect(const GramMatrix& G) {
  uniform_spacing(G.grid);
  const Eigen::Index n = G.size();
  ToeplitzDefect d;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const cplx next = G.entries((j + 1) % n, (k + 1) % n);
      const double spread = std::abs(G.entries(j, k) - next);
      d.circulant = std::max(d.circulant, spread);
      if (j + 1 < n && k + 1 < n) d.toeplitz = std::max(d.toeplitz, spread);
    }
  }
  return d;
}

ToeplitzSymbol symbol_from_problem(const EstimationProblem& problem, double tolerance) {
  problem.validate();
  const double theta0 = reference_point(problem);
  if (sinusoid_not_toeplitz(problem)) {
    const double defect = toeplitz_defect(gram_matrix(problem)).toeplitz;
    if (defect > tolerance) {
      throw Error(ErrorCode::NotToeplitz, "Toeplitz defect " + std::to_string(defect) + " exceeds tolerance");
    }
  }
  ToeplitzSymbol sym;
  EstimationProblem copy = problem;
  sym.G = [copy, theta0](double lag) { return state_overlap(copy, theta0 + lag, theta0); };
  sym.lag_scale = symbol_lag_scale(problem, theta0);
  sym.asymptote = symbol_asymptote(problem, theta0);
  if (problem.parameter == Parameter::Phase) sym.period = 2.0 * kPi;
  sym.name = to_string(problem.signal.kind) + "/" + to_string(problem.parameter) + "/" +
             to_string(problem.encoding);
  return sym;
}

ToeplitzSymbol frequency_symbol(double A, double T) {
  ToeplitzSymbol sym;
  const double mu = 0.25 * A * A * T;
  sym.G = [mu, T](double lag) { return cplx(std::exp(-mu * (1.0 - sinc(lag * T)))); };
  sym.lag_scale = 2.0 * kPi / T;
  sym.asymptote = cplx(std::exp(-mu));
  sym.name = "frequency";
  return sym;
}

double SpectralMeasure::continuous_mass() const {
  if (k.size() < 2) return 0.0;
  const double h = spacing();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += (i == 0 || i + 1 == g.size() ? 0.5 : 1.0) * g[i];
  return s * h;
}

double SpectralMeasure::mean() const {
  const double h = spacing();
  double m0 = dc_atom;
  double m1 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = (i == 0 || i + 1 == g.size() ? 0.5 : 1.0) * g[i] * h;
    m0 += w;
    m1 += w * k[i];
  }
  return m1 / m0;
}

double SpectralMeasure::variance() const {
  const double h = spacing();
  const double mu = mean();
  double m0 = dc_atom;
  double m2 = dc_atom * mu * mu;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = (i == 0 || i + 1 == g.size() ? 0.5 : 1.0) * g[i] * h;
    m0 += w;
    m2 += w * (k[i] - mu) * (k[i] - mu);
  }
  return m2 / m0;
}

SpectralMeasure spectral_measure(const ToeplitzSymbol& symbol, const std::vector<double>& k_grid,
                                 const SpectralOptions& options) {
  const double dk = uniform_spacing(k_grid);
  const double kmax = std::max(std::abs(k_grid.front()), std::abs(k_grid.back()));
  const double s = options.taper_width > 0.0 ? options.taper_width : 40.0 / dk;
  double step = options.lag_step;
  if (!(step > 0.0)) step = std::min(kPi / (4.0 * std::max(kmax, dk)), symbol.lag_scale / 8.0);
  double half = options.lag_half_width;
  if (!(half > 0.0)) half = std::max(8.0 * s, 40.0 * symbol.lag_scale);
  const std::size_t N = next_pow2(2.0 * half / step);
  const auto halfN = static_cast<long>(N / 2);
  half = static_cast<double>(halfN) * step;

  std::vector<cplx> samples(N);
  cplx outer = 0.0;
  cplx inner = 0.0;
  std::size_t n_outer = 0;
  std::size_t n_inner = 0;
  for (long j = -halfN; j < halfN; ++j) {
    const double theta = static_cast<double>(j) * step;
    const cplx v = symbol(theta);
    samples[static_cast<std::size_t>((j + static_cast<long>(N)) % static_cast<long>(N))] = v;
    const double r = std::abs(theta) / half;
    if (r >= 0.9) {
      outer += v;
      ++n_outer;
    } else if (r >= 0.8) {
      inner += v;
      ++n_inner;
    }
  }
  outer /= static_cast<double>(std::max<std::size_t>(n_outer, 1));
  inner /= static_cast<double>(std::max<std::size_t>(n_inner, 1));

  const double tol = options.tail_tolerance;
  cplx c = 0.0;
  if (symbol.asymptote) {
    c = *symbol.asymptote;
    if (std::abs(outer - c) > tol) {
      throw Error(ErrorCode::WindowTooNarrow, "symbol has not reached its asymptote within the lag window");
    }
  } else {
    if (std::abs(outer - inner) > tol) {
      throw Error(ErrorCode::WindowTooNarrow, "symbol tail is neither decayed nor constant within the lag window");
    }
    if (std::abs(outer) > tol) c = outer;
  }
  if (std::real(c) < -tol || std::abs(std::imag(c)) > tol) {
    throw Error(ErrorCode::NotPositive, "constant symbol tail is not a nonnegative real weight");
  }

  for (long j = -halfN; j < halfN; ++j) {
    const double theta = static_cast<double>(j) * step;
    auto& v = samples[static_cast<std::size_t>((j + static_cast<long>(N)) % static_cast<long>(N))];
    v = (v - c) * std::exp(-0.5 * theta * theta / (s * s)) * step;
  }

  Eigen::FFT<double> fft;
  std::vector<cplx> spectrum;
  fft.fwd(spectrum, samples);

  const double kstep = 2.0 * kPi / (static_cast<double>(N) * step);
  auto value_at = [&](long m) {
    const auto idx = static_cast<std::size_t>((m % static_cast<long>(N) + static_cast<long>(N)) % static_cast<long>(N));
    return std::real(spectrum[idx]) / (2.0 * kPi);
  };

  SpectralMeasure out;
  out.k = k_grid;
  out.g.resize(k_grid.size());
  out.dc_atom = std::real(c);
  out.taper_width = s;
  out.lag_half_width = half;
  double gmin = 0.0;
  double gmax = 0.0;
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    const double u = k_grid[i] / kstep;
    const auto m = static_cast<long>(std::floor(u));
    const double f = u - static_cast<double>(m);
    const double v = (1.0 - f) * value_at(m) + f * value_at(m + 1);
    out.g[i] = v;
    gmin = std::min(gmin, v);
    gmax = std::max(gmax, v);
  }
  out.min_before_clip = gmin;
  if (gmin < -options.negative_tolerance) {
    throw Error(ErrorCode::NotPositive, "spectral density reaches " + std::to_string(gmin));
  }
  out.support.resize(out.g.size());
  for (std::size_t i = 0; i < out.g.size(); ++i) {
    if (out.g[i] < 0.0) out.g[i] = 0.0;
    out.support[i] = out.g[i] > 1e-12 * gmax;
  }
  out.normalization_defect = std::abs(out.continuous_mass() + out.dc_atom - 1.0);
  return out;
}

double DiscreteSpectralMeasure::at(int k) const {
  if (k < k_min || k > k_max()) return 0.0;
  return g[static_cast<std::size_t>(k - k_min)];
}

double DiscreteSpectralMeasure::total() const {
  double s = 0.0;
  for (double v : g) s += v;
  return s;
}

double DiscreteSpectralMeasure::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m += g[i] * (k_min + static_cast<int>(i));
  return m / total();
}

double DiscreteSpectralMeasure::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = (k_min + static_cast<int>(i)) - mu;
    v += g[i] * d * d;
  }
  return v / total();
}

DiscreteSpectralMeasure discrete_spectral_measure(const ToeplitzSymbol& symbol, std::size_t samples) {
  const double period = 2.0 * kPi;
  if (symbol.period && std::abs(*symbol.period - period) > 1e-12) {
    throw Error(ErrorCode::NotCirculant, "symbol period is not 2 pi");
  }
  for (double theta : {0.0, 0.3, 1.1, 2.5, -1.7}) {
    if (std::abs(symbol(theta + period) - symbol(theta)) > 1e-9) {
      throw Error(ErrorCode::NotCirculant, "symbol is not 2 pi periodic");
    }
  }
  std::size_t N = samples > 0 ? next_pow2(static_cast<double>(samples)) : 256;
  Eigen::FFT<double> fft;
  std::vector<cplx> coeffs;
  for (;;) {
    std::vector<cplx> x(N);
    for (std::size_t n = 0; n < N; ++n) x[n] = symbol(-kPi + period * static_cast<double>(n) / static_cast<double>(N));
    fft.fwd(coeffs, x);
    if (samples > 0 || N >= (1u << 16)) break;
    double tail = 0.0;
    double peak = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      const double a = std::abs(coeffs[m]) / static_cast<double>(N);
      peak = std::max(peak, a);
      const std::size_t dist = std::min(m, N - m);
      if (dist >= 3 * N / 8) tail = std::max(tail, a);
    }
    if (tail <= 1e-15 * peak) break;
    N *= 2;
  }
  DiscreteSpectralMeasure out;
  const int half = static_cast<int>(N / 2);
  out.k_min = -half;
  out.g.resize(N);
  double gmin = 0.0;
  for (int k = -half; k < half; ++k) {
    const std::size_t idx = static_cast<std::size_t>((k + static_cast<int>(N)) % static_cast<int>(N));
    // theta_n starts at -pi, which contributes the phase exp(i k pi).
    const cplx v = coeffs[idx] / static_cast<double>(N) * std::polar(1.0, kPi * k);
    const double re = std::real(v);
    gmin = std::min(gmin, re);
    out.g[static_cast<std::size_t>(k + half)] = re;
  }
  out.min_before_clip = gmin;
  if (gmin < -1e-9) throw Error(ErrorCode::NotPositive, "discrete spectral weight reaches " + std::to_string(gmin));
  for (double& v : out.g) v = std::max(v, 0.0);
  return out;
}

double LowSnrTerms::density(double k) const {
  double g = 0.0;
  if (std::abs(k) < rectangle_half_width) g += rectangle_height;
  if (std::abs(k) < triangle_half_width) g += triangle_slope * (triangle_half_width - std::abs(k));
  return g;
}

double LowSnrTerms::total_mass() const {
  return atom + 2.0 * rectangle_half_width * rectangle_height + triangle_slope * triangle_half_width * triangle_half_width;
}

LowSnrTerms low_snr_spectral_terms(double A, double T, int order) {
  if (order < 0 || order > 2) throw Error(ErrorCode::InvalidArgument, "low-SNR expansion order must be 0, 1 or 2");
  const double pref = std::exp(-0.25 * A * A * T);
  LowSnrTerms t;
  t.atom = pref;
  if (order >= 1) {
    t.rectangle_height = pref * A * A / 8.0;
    t.rectangle_half_width = T;
  }
  if (order >= 2) {
    t.triangle_slope = pref * std::pow(A, 4) / 128.0;
    t.triangle_half_width = 2.0 * T;
  }
  return t;
}

double qfi_from_fidelity(const OverlapFunction& overlap, double theta, double step, FidelityStencil stencil) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fidelity step must be positive");
  auto estimate = [&](double d) {
    const double fp = std::norm(overlap(theta, theta + d));
    if (stencil == FidelityStencil::Forward) return 4.0 * (1.0 - fp) / (d * d);
    const double fm = std::norm(overlap(theta, theta - d));
    return 4.0 * (2.0 - fp - fm) / (2.0 * d * d);
  };
  const double coarse = estimate(step);
  const double fine = estimate(0.5 * step);
  const double scale = std::max(std::abs(coarse), std::abs(fine));
  if (scale > 0.0 && std::abs(coarse - fine) > 0.1 * scale) {
    throw Error(ErrorCode::StepTooLarge, "fidelity is not quadratic at step " + std::to_string(step));
  }
  return coarse;
}

double qfi_from_fidelity(const ToeplitzSymbol& symbol, double step, FidelityStencil stencil) {
  return qfi_from_fidelity([&](double a, double b) { return symbol(a - b); }, 0.0, step, stencil);
}

double qfi_from_fidelity(const EstimationProblem& problem, double theta, double step, FidelityStencil stencil) {
  return qfi_from_fidelity([&](double a, double b) { return state_overlap(problem, a, b); }, theta, step, stencil);
}

}  // namespace bql
