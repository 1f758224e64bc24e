#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "bql/error.hpp"
#include "bql/geometry.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace bql;

namespace {

constexpr double kPi = std::numbers::pi;

EstimationProblem frequency_problem(double A, double T, double lo, double hi, std::size_t n,
                                    Exactness e = Exactness::ManyCycles, Encoding enc = Encoding::Coherent) {
  EstimationProblem p;
  p.signal = SignalFamily::windowed_sinusoid(A, 0.5 * (lo + hi), 0.0, T);
  p.parameter = Parameter::Frequency;
  p.encoding = enc;
  p.exactness = e;
  p.prior = DiscretePrior::uniform(lo, hi, n);
  return p;
}

ToeplitzSymbol gaussian_symbol(double s) {
  ToeplitzSymbol sym;
  sym.G = [s](double x) { return cplx(std::exp(-0.5 * s * s * x * x)); };
  sym.lag_scale = 1.0 / s;
  sym.asymptote = cplx(0.0);
  return sym;
}

}  // namespace

TEST_CASE("coherent overlap of a complex exponential matches the closed form") {
  EstimationProblem p;
  p.signal = SignalFamily::complex_exponential(1.0, 1.0, 0.0, 4.0);
  p.prior = DiscretePrior::uniform(0.0, 2.0, 4);
  const double d = 0.7;
  const cplx got = state_overlap(p, 1.0, 1.0 + d);
  const double N = 2.0;
  const cplx expected = std::exp(-N + 0.5 * finite_time_delta(d, 4.0));
  CHECK(std::abs(got - expected) < 1e-13);
  CHECK(std::abs(state_overlap(p, 1.3, 1.3) - 1.0) < 1e-14);
}

TEST_CASE("single-particle overlap is normalized") {
  EstimationProblem p;
  p.signal = SignalFamily::complex_exponential(2.0, 1.0, 0.0, 3.0);
  p.encoding = Encoding::SingleParticle;
  p.prior = DiscretePrior::uniform(0.0, 2.0, 4);
  CHECK(std::abs(state_overlap(p, 0.4, 0.4) - 1.0) < 1e-14);
  CHECK(std::abs(state_overlap(p, 0.4, 0.4 + 2.0 * kPi / 3.0)) < 1e-13);
}

TEST_CASE("Gram invariants: Hermitian, unit diagonal, positive semidefinite") {
  gen::Source src(5);
  for (int trial = 0; trial < 10; ++trial) {
    const double A = src.uniform(0.2, 2.0);
    const double T = src.uniform(1.0, 10.0);
    const double lo = src.uniform(1.0, 5.0);
    const auto enc = trial % 2 == 0 ? Encoding::Coherent : Encoding::SingleParticle;
    const auto p = frequency_problem(A, T, lo, lo + src.uniform(0.5, 3.0), src.index(5, 40), Exactness::ManyCycles, enc);
    const GramMatrix G = gram_matrix(p);
    const GramCheck c = check_gram(G);
    CHECK(c.ok);
    CHECK(c.hermitian_defect < 1e-12);
    CHECK(c.diagonal_defect < 1e-12);
    CHECK(c.min_eigenvalue > -1e-10);
    for (Eigen::Index j = 0; j < G.size(); ++j) {
      for (Eigen::Index k = 0; k < G.size(); ++k) CHECK(std::abs(G.entries(j, k)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("encoding-specific Gram builders reject the other encoding") {
  auto p = frequency_problem(1.0, 1.0, 1.0, 2.0, 4);
  CHECK_NOTHROW(gram_coherent(p));
  CHECK_THROWS_AS(gram_single_particle(p), Error);
  p.encoding = Encoding::SingleParticle;
  CHECK_THROWS_AS(gram_coherent(p), Error);
}

TEST_CASE("Toeplitz defect vanishes for many-cycles frequency and not for the exact sinusoid") {
  const auto mc = frequency_problem(1.0, 10.0, 1.0, 3.0, 30, Exactness::ManyCycles);
  CHECK(toeplitz_defect(gram_matrix(mc)).toeplitz < 1e-12);
  const auto exact = frequency_problem(1.0, 10.0, 1.0, 3.0, 30, Exactness::Exact);
  CHECK(toeplitz_defect(gram_matrix(exact)).toeplitz > 1e-6);
  try {
    symbol_from_problem(exact);
    FAIL("expected NotToeplitz");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotToeplitz);
  }
  const auto sym = symbol_from_problem(mc);
  CHECK(std::abs(sym(0.0) - 1.0) < 1e-14);
  const auto ref = frequency_symbol(1.0, 10.0);
  for (double lag : {0.05, 0.3, 1.7}) CHECK(std::abs(sym(lag) - ref(lag)) < 1e-12);
  CHECK(std::abs(*sym.asymptote - std::exp(-2.5)) < 1e-14);
}

TEST_CASE("spectral measure of a Gaussian symbol matches the analytic density") {
  const auto sym = gaussian_symbol(1.0);
  const auto grid = linspace(-8.0, 8.0, 801);
  const SpectralMeasure g = spectral_measure(sym, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = std::exp(-0.5 * grid[i] * grid[i]) / std::sqrt(2.0 * kPi);
    err = std::max(err, std::abs(g.g[i] - exact));
  }
  CHECK(err <= 1e-6);
  CHECK(g.dc_atom < 1e-9);
  CHECK(g.continuous_mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(g.mean()) < 1e-9);
  CHECK(g.variance() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("constant symbol is a pure atom") {
  ToeplitzSymbol one;
  one.G = [](double) { return cplx(1.0); };
  one.asymptote = cplx(1.0);
  const SpectralMeasure g = spectral_measure(one, linspace(-4.0, 4.0, 801));
  CHECK(g.dc_atom == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g.continuous_mass() < 1e-9);
}

TEST_CASE("sinc symbol has a flat plateau of one half") {
  ToeplitzSymbol s;
  s.G = [](double x) { return cplx(sinc(x)); };
  s.asymptote = cplx(0.0);
  const auto grid = linspace(-3.0, 3.0, 601);
  const SpectralMeasure g = spectral_measure(s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i]) < 0.5) CHECK(g.g[i] == doctest::Approx(0.5).epsilon(2e-2));
    if (std::abs(grid[i]) > 1.5) CHECK(g.g[i] < 2e-2);
  }
}

TEST_CASE("spectral measure flags a symbol whose tail does not settle") {
  ToeplitzSymbol s;
  s.G = [](double x) { return cplx(0.5 + 0.5 * std::exp(-x * x)); };
  s.asymptote = cplx(0.0);
  try {
    spectral_measure(s, linspace(-1.0, 1.0, 101));
    FAIL("expected WindowTooNarrow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooNarrow);
  }
}

TEST_CASE("spectral measure rejects a non-positive-definite symbol") {
  ToeplitzSymbol s;
  s.G = [](double x) { return cplx(std::exp(-0.5 * x * x) * (1.0 + x * x)); };
  s.asymptote = cplx(0.0);
  CHECK_THROWS_AS(spectral_measure(s, linspace(-6.0, 6.0, 601)), Error);
}

TEST_CASE("discrete spectral measure of a phase symbol is Poisson") {
  EstimationProblem p;
  p.signal = SignalFamily::complex_exponential(1.0, 1.0, 0.0, 4.0);
  p.parameter = Parameter::Phase;
  p.prior = DiscretePrior::uniform(-kPi, kPi, 16);
  const double N = 2.0;
  const DiscreteSpectralMeasure d = discrete_spectral_measure(symbol_from_problem(p));
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(d.mean()) == doctest::Approx(N).epsilon(1e-10));
  CHECK(d.variance() == doctest::Approx(N).epsilon(1e-10));
  CHECK(d.mean() > 0.0);
  double fact = 1.0;
  for (int n = 0; n < 8; ++n) {
    if (n > 0) fact *= n;
    CHECK(d.at(n) == doctest::Approx(std::exp(-N) * std::pow(N, n) / fact).epsilon(1e-10));
  }
  CHECK(std::abs(d.at(-1)) < 1e-12);
}

TEST_CASE("discrete spectral measure rejects aperiodic symbols") {
  CHECK_THROWS_AS(discrete_spectral_measure(gaussian_symbol(1.0)), Error);
}

TEST_CASE("low-SNR expansion terms") {
  const LowSnrTerms t0 = low_snr_spectral_terms(1.0, 10.0, 0);
  CHECK(t0.atom == doctest::Approx(std::exp(-2.5)));
  CHECK(t0.rectangle_height == 0.0);
  const LowSnrTerms t2 = low_snr_spectral_terms(1.0, 10.0, 2);
  CHECK(t2.rectangle_height == doctest::Approx(std::exp(-2.5) / 8.0));
  CHECK(t2.rectangle_half_width == 10.0);
  CHECK(t2.triangle_half_width == 20.0);
  CHECK(t2.density(0.0) > t2.density(15.0));
  CHECK(t2.density(25.0) == 0.0);
  CHECK_THROWS_AS(low_snr_spectral_terms(1.0, 10.0, 3), Error);
  // the truncated series carries 1 + mu + mu^2/2 of the e^-mu prefactor
  const double mu = 0.25 * 0.01 * 10.0;
  const LowSnrTerms small = low_snr_spectral_terms(0.1, 10.0, 2);
  CHECK(small.total_mass() == doctest::Approx(std::exp(-mu) * (1.0 + mu + 0.5 * mu * mu)).epsilon(1e-9));
}

TEST_CASE("fidelity QFI recovers closed forms and detects large steps") {
  const auto p = frequency_problem(1.0, 10.0, 5.0, 7.0, 3);
  CHECK(qfi_from_fidelity(p, 6.0, 1e-4) == doctest::Approx(qfi(p, 6.0)).epsilon(1e-4));
  CHECK(qfi_from_fidelity(gaussian_symbol(2.0), 1e-4) == doctest::Approx(16.0).epsilon(1e-5));
  CHECK(qfi_from_fidelity(gaussian_symbol(2.0), 1e-4, FidelityStencil::Forward) ==
        doctest::Approx(16.0).epsilon(1e-3));
  try {
    qfi_from_fidelity(p, 6.0, 1.0);
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }
}

TEST_CASE("property: the symbol reproduces the many-cycles Gram entries") {
  gen::Source src(99);
  for (int trial = 0; trial < 8; ++trial) {
    const double A = src.uniform(0.3, 1.5);
    const double T = src.uniform(2.0, 12.0);
    const auto p = frequency_problem(A, T, 3.0, 3.0 + src.uniform(0.5, 2.0), 12);
    const auto G = gram_matrix(p);
    const auto sym = symbol_from_problem(p);
    double err = 0.0;
    for (Eigen::Index j = 0; j < G.size(); ++j) {
      for (Eigen::Index k = 0; k < G.size(); ++k) {
        err = std::max(err, std::abs(G.entries(j, k) - sym(G.grid[size_t(j)] - G.grid[size_t(k)])));
      }
    }
    CHECK(err < 1e-12);
  }
}

TEST_CASE("Gram entries from closed-form overlaps") {
  EstimationProblem amp;
  amp.signal = SignalFamily::complex_exponential(1.0, 1.0, 0.0, 10.0);
  amp.parameter = Parameter::Amplitude;
  amp.prior = DiscretePrior::uniform(0.9, 1.3, 2);  // grid {1.0, 1.2}
  CHECK(std::abs(gram_matrix(amp).entries(0, 1) - std::exp(-0.1)) < 1e-12);

  const auto mc = frequency_problem(1.0, 10.0, 1.0, 1.0 + kPi / 10.0 * 2.0, 2);  // spacing pi / T
  CHECK(std::abs(gram_matrix(mc).entries(0, 1) - std::exp(-2.5)) < 1e-12);

  auto zero = frequency_problem(0.0, 10.0, 1.0, 2.0, 5);
  CHECK((gram_matrix(zero).entries - Eigen::MatrixXcd::Ones(5, 5)).norm() < 1e-14);
}

TEST_CASE("single-particle Gram entries") {
  EstimationProblem c;
  c.signal = SignalFamily::complex_exponential(1.0, 1.0, 0.0, 2.0, Window::Centered);
  c.encoding = Encoding::SingleParticle;
  c.prior = DiscretePrior::uniform(1.0, 1.0 + 2.0 * kPi, 2);  // spacing pi
  CHECK(std::abs(gram_single_particle(c).entries(0, 1)) < 1e-14);
  EstimationProblem l;
  l.signal = SignalFamily::lorentzian(1.0, 1.0, 0.0, 1.0);
  l.encoding = Encoding::SingleParticle;
  l.prior = DiscretePrior::uniform(0.0, 4.0, 2);  // spacing 2
  CHECK(std::abs(gram_single_particle(l).entries(0, 1) - 0.5) < 1e-14);
}

TEST_CASE("symbol values at reference lags") {
  EstimationProblem amp;
  amp.signal = SignalFamily::complex_exponential(1.0, 1.0, 0.0, 10.0);
  amp.parameter = Parameter::Amplitude;
  amp.prior = DiscretePrior::uniform(0.5, 1.5, 4);
  CHECK(std::abs(symbol_from_problem(amp)(0.0) - 1.0) < 1e-14);
  CHECK(std::abs(frequency_symbol(1.0, 10.0)(1e6) - std::exp(-2.5)) < 1e-6);
  EstimationProblem ph;
  ph.signal = SignalFamily::complex_exponential(1.0, 1.0, 0.0, 2.0);  // A^2 T / 2 = 1
  ph.parameter = Parameter::Phase;
  ph.prior = DiscretePrior::uniform(-kPi, kPi, 8);
  const auto sym = symbol_from_problem(ph);
  CHECK(std::abs(sym(kPi) - std::exp(-2.0)) < 1e-12);
  REQUIRE(sym.period.has_value());
  CHECK(*sym.period == doctest::Approx(2.0 * kPi));
}

TEST_CASE("Toeplitz defect shrinks with the number of cycles and phase Grams are circulant") {
  CHECK(toeplitz_defect(GramMatrix{Eigen::MatrixXcd::Ones(4, 4), linspace(0, 1, 4)}).toeplitz == 0.0);
  const double T = 10.0;
  const double few_lo = 2.0 * kPi * 0.5 / T;
  const double many_lo = 2.0 * kPi * 50.0 / T;
  const auto few = frequency_problem(1.0, T, few_lo, few_lo + 1.0, 20, Exactness::Exact);
  const auto many = frequency_problem(1.0, T, many_lo, many_lo + 1.0, 20, Exactness::Exact);
  CHECK(toeplitz_defect(gram_matrix(few)).toeplitz > toeplitz_defect(gram_matrix(many)).toeplitz);

  EstimationProblem ph;
  ph.signal = SignalFamily::complex_exponential(1.0, 1.0, 0.0, 3.0);
  ph.parameter = Parameter::Phase;
  ph.prior = DiscretePrior::uniform(-kPi, kPi, 24);
  CHECK(toeplitz_defect(gram_matrix(ph)).circulant <= 1e-12);
}

TEST_CASE("discrete measure of a constant and Poisson normalization") {
  ToeplitzSymbol one;
  one.G = [](double) { return cplx(1.0); };
  const DiscreteSpectralMeasure d = discrete_spectral_measure(one);
  CHECK(d.at(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(d.at(1)) < 1e-14);
  for (double mu : {0.5, 1.0, 4.0}) {
    ToeplitzSymbol p;
    p.G = [mu](double x) { return std::exp(-mu * (1.0 - std::exp(cplx(0.0, x)))); };
    p.period = 2.0 * kPi;
    const DiscreteSpectralMeasure g = discrete_spectral_measure(p);
    CHECK(std::abs(g.total() - 1.0) <= 1e-10);
    if (mu == 1.0) {
      CHECK(g.at(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
      CHECK(g.at(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
      CHECK(std::abs(g.at(-1)) < 1e-12);
    }
  }
}

TEST_CASE("low-SNR terms at zero and small amplitude") {
  const LowSnrTerms z = low_snr_spectral_terms(0.0, 10.0, 2);
  CHECK(z.atom == 1.0);
  CHECK(z.rectangle_height == 0.0);
  CHECK(z.triangle_slope == 0.0);
  const double A = std::sqrt(0.01);
  const LowSnrTerms t = low_snr_spectral_terms(A, 10.0, 2);
  CHECK(t.rectangle_height == doctest::Approx(std::exp(-0.025) * 0.00125).epsilon(1e-12));
  CHECK(std::abs(t.total_mass() - 1.0) <= std::pow(A, 6) * 1000.0 / 384.0);
}

TEST_CASE("fidelity QFI reference values") {
  CHECK(qfi_from_fidelity(gaussian_symbol(1.0), 1e-3) == doctest::Approx(4.0).epsilon(1e-3));
  const auto zero = frequency_problem(0.0, 10.0, 5.0, 7.0, 3);
  CHECK(qfi_from_fidelity(zero, 6.0, 1e-3) == 0.0);
  const auto p = frequency_problem(1.0, 10.0, 5.0, 7.0, 3);
  CHECK(std::abs(qfi_from_fidelity(p, 2.0 * kPi, 1e-4) - 1000.0 / 3.0) <= 1.0);
}
