#include "bql/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bql/error.hpp"

namespace bql {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

struct Member {
  double A;
  double omega;
  double phi;
  double t0;
};

bool complex_kind(SignalKind kind) { return kind != SignalKind::WindowedSinusoid && kind != SignalKind::ScaledTemplate; }

double window_length(const SignalFamily& s) { return s.window_end() - s.window_start(); }
double window_mid(const SignalFamily& s) { return 0.5 * (s.window_start() + s.window_end()); }

// Integral of cos(x t + c) over the window.
double cos_integral(const SignalFamily& s, double x, double c) {
  const double L = window_length(s);
  return L * std::cos(x * window_mid(s) + c) * sinc(0.5 * x * L);
}

// Integral of exp(i x t) over the window.
cplx exp_integral(const SignalFamily& s, double x) {
  const double L = window_length(s);
  return L * std::exp(kI * (x * window_mid(s))) * sinc(0.5 * x * L);
}

double power_difference(double a, double b, int n) { return (std::pow(b, n) - std::pow(a, n)) / n; }

// Integral of t^2 cos(x t + c) over (a, b).
double t2_cos_integral(double x, double c, double a, double b) {
  const double tmax = std::max(std::abs(a), std::abs(b));
  if (std::abs(x) * tmax < 2.0) {
    cplx sum = 0.0;
    cplx term = 1.0;
    for (int n = 0; n < 60; ++n) {
      if (n > 0) term *= kI * x / static_cast<double>(n);
      sum += term * power_difference(a, b, n + 3);
    }
    return std::real(std::exp(kI * c) * sum);
  }
  auto F = [&](double t) {
    const double s = std::sin(x * t + c);
    const double co = std::cos(x * t + c);
    return t * t / x * s + 2.0 * t / (x * x) * co - 2.0 / (x * x * x) * s;
  };
  return F(b) - F(a);
}

cplx template_value(const SignalFamily& s, double t) {
  const auto& g = s.template_samples;
  if (g.empty()) return 0.0;
  const double u = (t - s.template_start) / s.template_dt;
  if (u < 0.0 || u > static_cast<double>(g.size() - 1)) return 0.0;
  const auto i = static_cast<std::size_t>(std::floor(u));
  if (i + 1 >= g.size()) return g.back();
  const double f = u - static_cast<double>(i);
  return g[i] * (1.0 - f) + g[i + 1] * f;
}

// Exact integral of |g|^2 for the piecewise-linear template.
double template_norm_sq(const SignalFamily& s) {
  const auto& g = s.template_samples;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    total += (std::norm(g[i]) + std::real(std::conj(g[i]) * g[i + 1]) + std::norm(g[i + 1])) / 3.0;
  }
  return total * s.template_dt;
}

cplx raw_inner(const SignalFamily& s, const Member& a, const Member& b, Exactness e) {
  const double AA = a.A * b.A;
  switch (s.kind) {
    case SignalKind::WindowedSinusoid: {
      double v = cos_integral(s, a.omega - b.omega, a.phi - b.phi);
      if (e == Exactness::Exact) v += cos_integral(s, a.omega + b.omega, a.phi + b.phi);
      return 0.5 * AA * v;
    }
    case SignalKind::ComplexExponential:
      return AA * std::exp(kI * (b.phi - a.phi)) * exp_integral(s, b.omega - a.omega);
    case SignalKind::SineGaussian: {
      const double d = a.t0 - b.t0;
      const double x = b.omega - a.omega;
      const double mag = std::sqrt(kPi) * s.sigma *
                         std::exp(-d * d / (4.0 * s.sigma * s.sigma) - s.sigma * s.sigma * x * x / 4.0);
      return AA * mag * std::exp(kI * (b.phi - a.phi + 0.5 * (a.omega + b.omega) * d));
    }
    case SignalKind::LorentzianDecay: {
      if (a.t0 != b.t0) throw Error(ErrorCode::Unsupported, "Lorentzian inner product needs a common t0");
      const double x = b.omega - a.omega;
      return AA * std::exp(kI * (b.phi - a.phi)) * (4.0 * s.gamma / (4.0 * s.gamma * s.gamma + x * x));
    }
    case SignalKind::ScaledTemplate:
      return AA * template_norm_sq(s);
    case SignalKind::PhaseRotated:
      return AA * std::exp(kI * (b.phi - a.phi)) * template_norm_sq(s);
  }
  return 0.0;
}

Member base_member(const SignalFamily& s) { return {s.amplitude, s.frequency, s.phase, s.t0}; }

double unit_norm_sq(const SignalFamily& s, Exactness e) {
  Member m = base_member(s);
  m.A = 1.0;
  return std::real(raw_inner(s, m, m, e));
}

void require_supported(const SignalFamily& s, Parameter p) {
  if (!supports(s, p)) {
    throw Error(ErrorCode::Unsupported, to_string(p) + " estimation is not available for " + to_string(s.kind));
  }
}

Member member(const SignalFamily& s, Parameter p, double theta, Exactness e) {
  require_supported(s, p);
  Member m = base_member(s);
  switch (p) {
    case Parameter::Frequency: m.omega = theta; break;
    case Parameter::Amplitude: m.A = theta; break;
    case Parameter::Phase: m.phi = complex_kind(s.kind) ? -theta : theta; break;
    case Parameter::PulseCentre: m.t0 = theta; break;
    case Parameter::Displacement: {
      const double n1 = unit_norm_sq(s, e);
      if (!(n1 > 0.0)) throw Error(ErrorCode::DivergentNorm, "displacement needs a waveform with nonzero norm");
      m.A = theta / std::sqrt(n1);
      break;
    }
  }
  return m;
}

cplx raw_evaluate(const SignalFamily& s, const Member& m, double t) {
  if (s.windowed() && (t < s.window_start() || t > s.window_end())) return 0.0;
  switch (s.kind) {
    case SignalKind::WindowedSinusoid: return m.A * std::cos(m.omega * t + m.phi);
    case SignalKind::ComplexExponential: return -kI * m.A * std::exp(kI * (m.omega * t + m.phi));
    case SignalKind::SineGaussian: {
      const double u = t - m.t0;
      return m.A * std::exp(cplx(-u * u / (2.0 * s.sigma * s.sigma), m.omega * u + m.phi));
    }
    case SignalKind::LorentzianDecay: {
      const double u = t - m.t0;
      return m.A * std::exp(cplx(-s.gamma * std::abs(u), m.omega * u + m.phi));
    }
    case SignalKind::ScaledTemplate: return m.A * template_value(s, t);
    case SignalKind::PhaseRotated: return m.A * std::exp(kI * m.phi) * template_value(s, t);
  }
  return 0.0;
}

double coherent_qfi(const SignalFamily& s, Parameter p, Exactness e, const Member& m) {
  const double A2 = m.A * m.A;
  const double ta = s.window_start();
  const double tb = s.window_end();
  switch (p) {
    case Parameter::Frequency:
      switch (s.kind) {
        case SignalKind::WindowedSinusoid: {
          const double base = power_difference(ta, tb, 3);
          if (e == Exactness::ManyCycles) return A2 * base;
          return A2 * (base - t2_cos_integral(2.0 * m.omega, 2.0 * m.phi, ta, tb));
        }
        case SignalKind::ComplexExponential: return 2.0 * A2 * power_difference(ta, tb, 3);
        case SignalKind::SineGaussian: return std::sqrt(kPi) * A2 * std::pow(s.sigma, 3);
        case SignalKind::LorentzianDecay: return A2 / std::pow(s.gamma, 3);
        default: break;
      }
      break;
    case Parameter::Amplitude: return 2.0 * unit_norm_sq(s, e);
    case Parameter::Displacement: return 2.0;
    case Parameter::Phase:
      switch (s.kind) {
        case SignalKind::WindowedSinusoid: {
          const double L = window_length(s);
          if (e == Exactness::ManyCycles) return A2 * L;
          return A2 * (L - cos_integral(s, 2.0 * m.omega, 2.0 * m.phi));
        }
        default: return 2.0 * std::real(raw_inner(s, m, m, e));
      }
    case Parameter::PulseCentre:
      return A2 * std::sqrt(kPi) * (1.0 / s.sigma + 2.0 * m.omega * m.omega * s.sigma);
  }
  throw Error(ErrorCode::Unsupported, "no closed-form QFI");
}

double single_particle_qfi(const SignalFamily& s, Parameter p, Exactness e) {
  const double ta = s.window_start();
  const double tb = s.window_end();
  switch (p) {
    case Parameter::Amplitude:
    case Parameter::Displacement: return 0.0;
    case Parameter::Frequency:
      switch (s.kind) {
        case SignalKind::WindowedSinusoid:
          if (e == Exactness::ManyCycles) return 4.0 * power_difference(ta, tb, 3) / (tb - ta);
          break;
        case SignalKind::ComplexExponential: return (tb - ta) * (tb - ta) / 3.0;
        case SignalKind::SineGaussian: return 2.0 * s.sigma * s.sigma;
        case SignalKind::LorentzianDecay: return 2.0 / (s.gamma * s.gamma);
        default: break;
      }
      break;
    case Parameter::Phase:
      if (s.kind == SignalKind::WindowedSinusoid) {
        if (e == Exactness::ManyCycles) return 4.0;
        break;
      }
      return 0.0;
    case Parameter::PulseCentre: return 2.0 / (s.sigma * s.sigma);
  }
  throw Error(ErrorCode::Unsupported, "no closed-form single-particle QFI for " + to_string(s.kind) + "/" +
                                          to_string(p) + " (" + to_string(e) + ")");
}

}  // namespace

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::WindowedSinusoid: return "WindowedSinusoid";
    case SignalKind::ComplexExponential: return "ComplexExponential";
    case SignalKind::SineGaussian: return "SineGaussian";
    case SignalKind::LorentzianDecay: return "LorentzianDecay";
    case SignalKind::ScaledTemplate: return "ScaledTemplate";
    case SignalKind::PhaseRotated: return "PhaseRotated";
  }
  return "Unknown";
}

std::string to_string(Parameter parameter) {
  switch (parameter) {
    case Parameter::Frequency: return "Frequency";
    case Parameter::Amplitude: return "Amplitude";
    case Parameter::Phase: return "Phase";
    case Parameter::PulseCentre: return "PulseCentre";
    case Parameter::Displacement: return "Displacement";
  }
  return "Unknown";
}

std::string to_string(Encoding encoding) {
  return encoding == Encoding::Coherent ? "Coherent" : "SingleParticle";
}

std::string to_string(Exactness exactness) {
  return exactness == Exactness::Exact ? "Exact" : "ManyCycles";
}

std::string to_string(Window window) { return window == Window::ZeroToT ? "ZeroToT" : "Centered"; }

SignalFamily SignalFamily::windowed_sinusoid(double A, double omega, double phi, double T, Window window) {
  SignalFamily s;
  s.kind = SignalKind::WindowedSinusoid;
  s.amplitude = A;
  s.frequency = omega;
  s.phase = phi;
  s.duration = T;
  s.window = window;
  return s;
}

SignalFamily SignalFamily::complex_exponential(double A, double omega, double phi, double T, Window window) {
  SignalFamily s = windowed_sinusoid(A, omega, phi, T, window);
  s.kind = SignalKind::ComplexExponential;
  return s;
}

SignalFamily SignalFamily::sine_gaussian(double A, double omega, double phi, double sigma, double t0) {
  SignalFamily s;
  s.kind = SignalKind::SineGaussian;
  s.amplitude = A;
  s.frequency = omega;
  s.phase = phi;
  s.sigma = sigma;
  s.t0 = t0;
  return s;
}

SignalFamily SignalFamily::lorentzian(double A, double omega, double phi, double gamma, double t0) {
  SignalFamily s;
  s.kind = SignalKind::LorentzianDecay;
  s.amplitude = A;
  s.frequency = omega;
  s.phase = phi;
  s.gamma = gamma;
  s.t0 = t0;
  return s;
}

SignalFamily SignalFamily::scaled_template(std::vector<cplx> samples, double dt, double start, double A) {
  if (samples.size() < 2 || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "template needs >= 2 samples and dt > 0");
  SignalFamily s;
  s.kind = SignalKind::ScaledTemplate;
  s.amplitude = A;
  s.template_samples = std::move(samples);
  s.template_dt = dt;
  s.template_start = start;
  return s;
}

SignalFamily SignalFamily::phase_rotated(std::vector<cplx> samples, double dt, double start, double A) {
  SignalFamily s = scaled_template(std::move(samples), dt, start, A);
  s.kind = SignalKind::PhaseRotated;
  return s;
}

bool SignalFamily::windowed() const {
  return kind == SignalKind::WindowedSinusoid || kind == SignalKind::ComplexExponential;
}

double SignalFamily::window_start() const { return window == Window::ZeroToT ? 0.0 : -0.5 * duration; }
double SignalFamily::window_end() const { return window == Window::ZeroToT ? duration : 0.5 * duration; }

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

cplx finite_time_delta(double x, double T) {
  if (x == 0.0) return T;
  return (std::exp(kI * (x * T)) - 1.0) / (kI * x);
}

bool supports(const SignalFamily& s, Parameter p) {
  switch (s.kind) {
    case SignalKind::WindowedSinusoid:
    case SignalKind::ComplexExponential:
    case SignalKind::LorentzianDecay: return p != Parameter::PulseCentre;
    case SignalKind::SineGaussian: return true;
    case SignalKind::ScaledTemplate: return p == Parameter::Amplitude || p == Parameter::Displacement;
    case SignalKind::PhaseRotated:
      return p == Parameter::Amplitude || p == Parameter::Displacement || p == Parameter::Phase;
  }
  return false;
}

cplx evaluate(const SignalFamily& signal, Parameter parameter, double theta, double t) {
  return raw_evaluate(signal, member(signal, parameter, theta, Exactness::Exact), t);
}

double mean_particle_number(const SignalFamily& signal, Parameter parameter, double theta, Exactness exactness) {
  const Member m = member(signal, parameter, theta, exactness);
  return 0.5 * std::real(raw_inner(signal, m, m, exactness));
}

cplx l2_inner_product(const SignalFamily& signal, Parameter parameter, double theta, double theta_prime,
                      Exactness exactness) {
  return raw_inner(signal, member(signal, parameter, theta, exactness),
                   member(signal, parameter, theta_prime, exactness), exactness);
}

cplx l2_inner_product_quadrature(const SignalFamily& signal, Parameter parameter, double theta, double theta_prime,
                                 double t_lo, double t_hi, std::size_t steps) {
  if (steps < 1 || !(t_hi > t_lo)) throw Error(ErrorCode::InvalidArgument, "quadrature needs t_hi > t_lo");
  const Member a = member(signal, parameter, theta, Exactness::Exact);
  const Member b = member(signal, parameter, theta_prime, Exactness::Exact);
  const double h = (t_hi - t_lo) / static_cast<double>(steps);
  cplx sum = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = t_lo + h * static_cast<double>(i);
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    sum += w * std::conj(raw_evaluate(signal, a, t)) * raw_evaluate(signal, b, t);
  }
  return sum * h;
}

void EstimationProblem::validate() const {
  require_supported(signal, parameter);
  if (sampling_dt) {
    const double dt = *sampling_dt;
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling step must be positive");
    if (parameter == Parameter::Frequency) {
      const double nyquist = kPi / dt;
      const double top = std::max(std::abs(grid().front()), std::abs(grid().back()));
      if (top >= nyquist) {
        throw Error(ErrorCode::Aliased, "grid frequency " + std::to_string(top) + " reaches the Nyquist bound " +
                                            std::to_string(nyquist));
      }
      if ((grid().back() - grid().front()) * dt >= kPi) {
        throw Error(ErrorCode::Aliased, "prior width times sampling step must stay below pi");
      }
    }
  }
}

double qfi(const EstimationProblem& problem, double theta) {
  const SignalFamily& s = problem.signal;
  const Member m = member(s, problem.parameter, theta, problem.exactness);
  if (problem.encoding == Encoding::Coherent) return coherent_qfi(s, problem.parameter, problem.exactness, m);
  return single_particle_qfi(s, problem.parameter, problem.exactness);
}

double prior_fisher_information(const DiscretePrior& prior) {
  const auto& pi = prior.densities();
  const double h = prior.spacing();
  const std::size_t n = pi.size();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(pi[j] > 0.0)) continue;
    const bool left = j > 0 && pi[j - 1] > 0.0;
    const bool right = j + 1 < n && pi[j + 1] > 0.0;
    double d = 0.0;
    if (left && right) {
      d = (pi[j + 1] - pi[j - 1]) / (2.0 * h);
    } else if (right) {
      d = (pi[j + 1] - pi[j]) / h;
    } else if (left) {
      d = (pi[j] - pi[j - 1]) / h;
    }
    total += d * d / pi[j] * h;
  }
  return total;
}

}  // namespace bql
