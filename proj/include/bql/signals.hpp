#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bql/prior.hpp"

namespace bql {

using cplx = std::complex<double>;

enum class SignalKind {
  WindowedSinusoid,
  ComplexExponential,
  SineGaussian,
  LorentzianDecay,
  ScaledTemplate,
  PhaseRotated,
};

enum class Window { ZeroToT, Centered };

enum class Parameter { Frequency, Amplitude, Phase, PulseCentre, Displacement };

enum class Encoding { Coherent, SingleParticle };

/** Exact finite-window closed forms, or their many-cycles limit. */
enum class Exactness { Exact, ManyCycles };

std::string to_string(SignalKind kind);
std::string to_string(Parameter parameter);
std::string to_string(Encoding encoding);
std::string to_string(Exactness exactness);
std::string to_string(Window window);

/**
 * Parameterized classical waveform h(t).
 *
 * Kinds and their waveforms (units Hz^1/2):
 *   WindowedSinusoid    A cos(wt + phi) on the window
 *   ComplexExponential  -i A exp(i(wt + phi)) on the window
 *   SineGaussian        A exp(-(t-t0)^2/(2 sigma^2) + i w (t-t0) + i phi)
 *   LorentzianDecay     A exp(-gamma|t-t0| + i w (t-t0) + i phi)
 *   ScaledTemplate      A g(t)
 *   PhaseRotated        A exp(i phi) g(t)
 * where g is a sampled template, linearly interpolated and zero outside.
 *
 * For Phase problems on the complex-valued kinds the estimated phase enters
 * as phi = -theta, which places the circulant spectral weight on k >= 0.
 */
struct SignalFamily {
  SignalKind kind = SignalKind::WindowedSinusoid;
  double amplitude = 1.0;
  double phase = 0.0;
  double frequency = 0.0;
  Window window = Window::ZeroToT;
  double duration = 1.0;
  double sigma = 1.0;
  double t0 = 0.0;
  double gamma = 1.0;
  std::vector<cplx> template_samples;
  double template_dt = 1.0;
  double template_start = 0.0;

  static SignalFamily windowed_sinusoid(double A, double omega, double phi, double T,
                                        Window window = Window::ZeroToT);
  static SignalFamily complex_exponential(double A, double omega, double phi, double T,
                                          Window window = Window::ZeroToT);
  static SignalFamily sine_gaussian(double A, double omega, double phi, double sigma, double t0 = 0.0);
  static SignalFamily lorentzian(double A, double omega, double phi, double gamma, double t0 = 0.0);
  static SignalFamily scaled_template(std::vector<cplx> samples, double dt, double start, double A = 1.0);
  static SignalFamily phase_rotated(std::vector<cplx> samples, double dt, double start, double A = 1.0);

  bool windowed() const;
  /** Support interval of windowed kinds. */
  double window_start() const;
  double window_end() const;
};

/** sin(x)/x with the removable singularity filled. */
double sinc(double x);

/** Finite-time delta (e^{ixT} - 1)/(ix); equals T at x = 0. */
cplx finite_time_delta(double x, double T);

/** h_theta(t) for the given estimated parameter. */
cplx evaluate(const SignalFamily& signal, Parameter parameter, double theta, double t);

/** Mean particle number (1/2) * integral |h_theta|^2. */
double mean_particle_number(const SignalFamily& signal, Parameter parameter, double theta,
                            Exactness exactness = Exactness::Exact);

/** L2 inner product integral conj(h_theta) h_theta'. */
cplx l2_inner_product(const SignalFamily& signal, Parameter parameter, double theta, double theta_prime,
                      Exactness exactness = Exactness::Exact);

/** Composite trapezoid quadrature of the same inner product, used as a cross-check. */
cplx l2_inner_product_quadrature(const SignalFamily& signal, Parameter parameter, double theta,
                                 double theta_prime, double t_lo, double t_hi, std::size_t steps);

/** Whether the closed forms above cover this kind/parameter pair. */
bool supports(const SignalFamily& signal, Parameter parameter);

struct EstimationProblem {
  SignalFamily signal;
  Parameter parameter = Parameter::Frequency;
  Encoding encoding = Encoding::Coherent;
  Exactness exactness = Exactness::Exact;
  DiscretePrior prior = DiscretePrior::uniform(0.0, 1.0, 2);
  std::optional<double> sampling_dt;

  const std::vector<double>& grid() const { return prior.grid(); }
  /** Throws on unsupported combinations or aliasing of an attached discretization. */
  void validate() const;
};

/** Closed-form QFI for the problem's encoding; throws Unsupported when none exists. */
double qfi(const EstimationProblem& problem, double theta);

/** Fisher information of the prior density by central differences on its support. */
double prior_fisher_information(const DiscretePrior& prior);

}  // namespace bql
