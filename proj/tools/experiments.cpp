#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "bql/error.hpp"

namespace bqlcli {

using namespace bql;

namespace {

constexpr double kPi = std::numbers::pi;

nlohmann::json mc_json(const McResult& r) {
  return {{"bmse", r.bmse}, {"se", r.se}, {"squared_error", r.squared_error},
          {"squared_error_se", r.squared_error_se}, {"trials", r.trials}};
}

std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

void write_fig2(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const Fig2Analysis a = fig2_analysis(c.amplitude, c.T, c.T / 1000.0);
  const auto dir = c.output;
  write_symbol_csv(dir / "fig2_symbol.csv", a.symbol, linspace(-2.0 * kPi * 0.9, 2.0 * kPi * 0.9, 2001));
  write_spectral_measure_csv(dir / "fig2_spectral.csv", a.measure);
  std::vector<double> low(a.measure.k.size());
  for (std::size_t i = 0; i < low.size(); ++i) low[i] = a.terms.density(a.measure.k[i]);
  write_two_column_csv(dir / "fig2_low_snr.csv", {"k", "s"}, {"g", "1/s"}, a.measure.k, low,
                       {"dc_atom=" + format_double(a.terms.atom)});
  nlohmann::json s;
  s["amplitude"] = c.amplitude;
  s["T"] = c.T;
  s["dc_atom"] = a.measure.dc_atom;
  s["diagnosis"] = a.diagnosis.label();
  s["jump_locations"] = a.diagnosis.jump_locations;
  s["step_height_plus"] = a.step_plus;
  s["step_height_minus"] = a.step_minus;
  s["plateau"] = a.plateau;
  s["rectangle_height"] = a.terms.rectangle_height;
  s["normalization_defect"] = a.measure.normalization_defect;
  write_json(dir / "fig2_summary.json", s);
  outputs.insert(outputs.end(), {"fig2_symbol.csv", "fig2_spectral.csv", "fig2_low_snr.csv", "fig2_summary.json"});
}

void write_fig3(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const auto schemes = fig3_schemes();
  ExperimentConfig inner = c;
  inner.threads = 1;
  const auto points = run_pool<Fig3Point>(c.snr.size(), c.threads,
                                          [&](std::size_t i) { return fig3_point(inner, c.snr[i], schemes); });
  std::vector<SweepRow> rows;
  nlohmann::json solutions = nlohmann::json::array();
  for (const auto& p : points) {
    const auto r = fig3_rows(p);
    rows.insert(rows.end(), r.begin(), r.end());
    nlohmann::json s = solution_json(p.solution);
    s["snr"] = p.snr;
    s["rank"] = p.rank;
    nlohmann::json mc;
    for (const auto& e : p.schemes) mc[e.name] = mc_json(e.result);
    s["monte_carlo"] = mc;
    solutions.push_back(s);
  }
  write_sweep_csv(c.output / "fig3_sweep.csv", rows);
  write_json(c.output / "fig3_solutions.json", solutions);
  outputs.insert(outputs.end(), {"fig3_sweep.csv", "fig3_solutions.json"});
}

void write_phase(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const auto rows = run_pool<PhaseRow>(c.mu.size(), c.threads, [&](std::size_t i) { return phase_row(c.mu[i]); });
  nlohmann::json j = nlohmann::json::array();
  std::vector<double> mus, holevo;
  for (const auto& r : rows) {
    j.push_back({{"mu", r.mu}, {"holevo", r.holevo}, {"squared_error", r.squared_error},
                 {"normalization", r.normalization}});
    mus.push_back(r.mu);
    holevo.push_back(r.holevo);
  }
  write_two_column_csv(c.output / "phase_holevo.csv", {"mu", "1"}, {"holevo", "rad^2"}, mus, holevo);
  write_json(c.output / "phase.json", j);
  outputs.insert(outputs.end(), {"phase_holevo.csv", "phase.json"});
}

void write_ratio(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const auto symbol = frequency_symbol(c.amplitude, c.T);
  std::vector<double> widths;
  for (double d : c.decades) widths.push_back(decade_width(d, c.omega_lo));
  const auto rows = finite_prior_ratio(symbol, widths);
  std::vector<double> ratio;
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ratio.push_back(rows[i].ratio);
    j.push_back({{"decades", c.decades[i]}, {"width", rows[i].width}, {"posterior_variance", rows[i].posterior_variance},
                 {"prior_variance", rows[i].prior_variance}, {"ratio", rows[i].ratio}});
  }
  write_two_column_csv(c.output / "whitening_ratio.csv", {"decades", "1"}, {"ratio", "1"}, c.decades, ratio);
  write_json(c.output / "whitening_ratio.json", j);
  outputs.insert(outputs.end(), {"whitening_ratio.csv", "whitening_ratio.json"});
}

void write_rank_sweep(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const std::size_t cols = c.sizes.size();
  const auto ranks = run_pool<long>(c.snr.size() * cols, c.threads,
                                    [&](std::size_t i) { return rank_at(c, c.snr[i / cols], c.sizes[i % cols]); });
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t s = 0; s < c.snr.size(); ++s) {
    nlohmann::json row{{"snr", c.snr[s]}};
    for (std::size_t k = 0; k < cols; ++k) row["rank_n" + std::to_string(c.sizes[k])] = ranks[s * cols + k];
    j.push_back(row);
  }
  for (std::size_t k = 0; k < cols; ++k) {
    std::vector<double> r;
    for (std::size_t s = 0; s < c.snr.size(); ++s) r.push_back(static_cast<double>(ranks[s * cols + k]));
    const std::string name = "rank_n" + std::to_string(c.sizes[k]) + ".csv";
    write_two_column_csv(c.output / name, {"snr", "1"}, {"rank", "1"}, c.snr, r);
    outputs.push_back(name);
  }
  write_json(c.output / "rank_sweep.json", j);
  outputs.push_back("rank_sweep.json");
}

void write_oracle(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const auto rows = run_pool<OracleComparison>(c.snr.size(), c.threads,
                                               [&](std::size_t i) { return oracle_check(c, c.snr[i]); });
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"snr", r.snr}, {"pipeline_mbmse", r.pipeline}, {"oracle_mbmse", r.oracle},
                 {"relative_difference", r.relative_difference}, {"max_defect", r.max_defect}, {"rank", r.rank}});
  }
  write_json(c.output / "oracle_check.json", j);
  outputs.push_back("oracle_check.json");
}

}  // namespace

double amplitude_for_snr(double snr, double T) { return snr / std::sqrt(2.0 * T); }

EstimationProblem frequency_problem(double A, double T, double omega_min, double omega_max, std::size_t n, double dt,
                                    double phi) {
  EstimationProblem p;
  p.signal = SignalFamily::windowed_sinusoid(A, 0.5 * (omega_min + omega_max), phi, T);
  p.parameter = Parameter::Frequency;
  p.encoding = Encoding::Coherent;
  p.exactness = Exactness::Exact;
  p.prior = DiscretePrior::uniform(omega_min, omega_max, n);
  p.sampling_dt = dt;
  return p;
}

EstimationProblem frequency_problem(const ExperimentConfig& c, double snr, std::size_t n) {
  return frequency_problem(amplitude_for_snr(snr, c.T), c.T, c.omega_min(), c.omega_max(), n, c.dt, c.phi);
}

std::vector<MeasurementScheme> fig3_schemes() {
  return {{SchemeKind::TimeQuadrature, FourierTransform::DFT},
          {SchemeKind::TimeCounting, FourierTransform::DFT},
          {SchemeKind::FourierCounting, FourierTransform::DCT}};
}

Fig3Point fig3_point(const ExperimentConfig& c, double snr, const std::vector<MeasurementScheme>& schemes) {
  const EstimationProblem problem = frequency_problem(c, snr, c.n);
  Fig3Point p;
  p.snr = snr;
  p.amplitude = problem.signal.amplitude;
  const PipelineResult pipe = solve_problem(problem, c.tau);
  p.solution = pipe.solution;
  p.mbmse = pipe.solution.mbmse;
  p.prior_var = problem.prior.variance();
  p.rank = static_cast<long>(pipe.basis.rank());
  const double info = qfi(problem, problem.prior.mean());
  p.qcrb = info > 0.0 ? 1.0 / info : std::numeric_limits<double>::infinity();
  if (!schemes.empty()) {
    const DiscretizedBath bath = discretize(problem, bins_for_duration(c.T, c.dt), c.dt);
    McOptions mc;
    mc.trials = c.trials;
    mc.seed = c.seed;
    mc.threads = c.threads;
    for (const auto& s : schemes) {
      p.schemes.push_back({to_string(s.kind), bmse_monte_carlo(bath, problem.prior, s, mc)});
    }
  }
  return p;
}

std::vector<SweepRow> fig3_rows(const Fig3Point& p) {
  std::vector<SweepRow> rows;
  for (const auto& e : p.schemes) {
    rows.push_back({p.snr, e.name, e.result.bmse, e.result.se, p.mbmse, p.qcrb, p.prior_var, p.rank});
  }
  rows.push_back({p.snr, "Optimal", p.mbmse, 0.0, p.mbmse, p.qcrb, p.prior_var, p.rank});
  rows.push_back({p.snr, "QCRB", p.qcrb, 0.0, p.mbmse, p.qcrb, p.prior_var, p.rank});
  rows.push_back({p.snr, "Prior", p.prior_var, 0.0, p.mbmse, p.qcrb, p.prior_var, p.rank});
  return rows;
}

double step_height(const SpectralMeasure& g, double k0, double fit_width, double gap) {
  std::vector<double> lx, ly, rx, ry;
  for (std::size_t i = 0; i < g.k.size(); ++i) {
    const double d = g.k[i] - k0;
    if (d <= -gap && d >= -gap - fit_width) {
      lx.push_back(g.k[i]);
      ly.push_back(g.g[i]);
    } else if (d >= gap && d <= gap + fit_width) {
      rx.push_back(g.k[i]);
      ry.push_back(g.g[i]);
    }
  }
  if (lx.size() < 2 || rx.size() < 2) throw Error(ErrorCode::InvalidArgument, "k grid does not cover the fit windows");
  const auto [ls, li] = line_fit(lx, ly);
  const auto [rs, ri] = line_fit(rx, ry);
  return std::abs((ls * k0 + li) - (rs * k0 + ri));
}

Fig2Analysis fig2_analysis(double A, double T, double dk) {
  Fig2Analysis a;
  a.symbol = frequency_symbol(A, T);
  const auto half = static_cast<std::size_t>(std::llround(3.0 * T / dk));
  a.measure = spectral_measure(a.symbol, linspace(-3.0 * T, 3.0 * T, 2 * half + 1));
  a.diagnosis = diagnose(a.measure);
  a.terms = low_snr_spectral_terms(A, T, 2);
  a.step_plus = step_height(a.measure, T, 0.05 * T, 5.0 * dk);
  a.step_minus = step_height(a.measure, -T, 0.05 * T, 5.0 * dk);
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.measure.k.size(); ++i) {
    if (a.measure.k[i] > 0.25 * T && a.measure.k[i] < 0.75 * T) {
      s += a.measure.g[i];
      ++count;
    }
  }
  a.plateau = count > 0 ? s / static_cast<double>(count) : 0.0;
  return a;
}

OracleComparison oracle_check(const ExperimentConfig& c, double snr) {
  const double dt = c.oracle_T / static_cast<double>(c.bins - 1);
  const double lo = c.oracle_omega0 - 0.5 * c.oracle_delta_omega;
  const double hi = c.oracle_omega0 + 0.5 * c.oracle_delta_omega;
  const EstimationProblem problem =
      frequency_problem(amplitude_for_snr(snr, c.oracle_T), c.oracle_T, lo, hi, c.oracle_n, dt, c.phi);
  const DiscretizedBath bath = discretize(problem, c.bins, dt);
  const GramMatrix G = gram_discretized(bath);
  const WaveformBasis basis = truncated_basis(G, c.tau);
  const BayesSolution pipe = bsld_mbmse(mixed_state(basis, problem.prior), problem.prior.variance());
  FockOracleConfig fc;
  fc.M = c.bins;
  fc.d = c.oracle_d;
  fc.dt = dt;
  const FockStates states = fock_oracle_states(bath.alpha, fc);
  const BayesSolution full = full_space_solution(states.vectors, problem.prior);
  OracleComparison r;
  r.snr = snr;
  r.pipeline = pipe.mbmse;
  r.oracle = full.mbmse;
  r.relative_difference = std::abs(pipe.mbmse - full.mbmse) / full.mbmse;
  r.max_defect = states.max_defect();
  r.rank = static_cast<long>(basis.rank());
  return r;
}

PhaseRow phase_row(double mu) {
  EstimationProblem p;
  p.signal = SignalFamily::complex_exponential(std::sqrt(2.0 * mu), 0.0, 0.0, 1.0);
  p.parameter = Parameter::Phase;
  p.prior = DiscretePrior::uniform(-kPi, kPi, 64);
  const ToeplitzSymbol symbol = symbol_from_problem(p);
  const DiscreteSpectralMeasure g = discrete_spectral_measure(symbol);
  const CirculantWhitening h = circulant_whitening(g, CirculantCost::HolevoVariance);
  const CirculantWhitening s = circulant_whitening(g, CirculantCost::SquaredError);
  return {mu, h.cost, s.cost, h.normalization};
}

long rank_at(const ExperimentConfig& c, double snr, std::size_t n) {
  return static_cast<long>(truncated_basis(gram_matrix(frequency_problem(c, snr, n)), c.tau).rank());
}

nlohmann::json displacement_result(const ExperimentConfig& c) {
  const double sigma = c.sigma;
  const DiscretePrior prior = DiscretePrior::gaussian(0.0, sigma, 401, 6.0 * sigma);
  Eigen::MatrixXcd alpha(static_cast<Eigen::Index>(prior.size()), 1);
  for (std::size_t j = 0; j < prior.size(); ++j) alpha(static_cast<Eigen::Index>(j), 0) = cplx(0.0, prior.grid()[j] / std::sqrt(2.0));
  FockOracleConfig fc;
  fc.M = 1;
  fc.d = c.fock_dim;
  fc.max_defect = 1.0;
  const FockStates states = fock_oracle_states(alpha, fc);
  const BayesSolution oracle = full_space_solution(states.vectors, prior);
  const DiscretizedBath bath = bath_from_amplitudes(prior.grid(), alpha);
  McOptions mc;
  mc.trials = c.trials;
  mc.seed = c.seed;
  mc.threads = c.threads;
  const McResult quad = bmse_monte_carlo(bath, prior, {SchemeKind::TimeQuadrature, FourierTransform::DFT}, mc);
  const McResult count = bmse_monte_carlo(bath, prior, {SchemeKind::TimeCounting, FourierTransform::DFT}, mc);
  nlohmann::json j;
  j["sigma"] = sigma;
  j["quadrature"] = displacement_toy(sigma, ToyScheme::Quadrature).bmse;
  j["counting"] = displacement_toy(sigma, ToyScheme::NumberResolving).bmse;
  j["mbmse"] = displacement_toy(sigma, ToyScheme::Optimal).bmse;
  j["posterior_mean_factor"] = displacement_toy(sigma, ToyScheme::Quadrature).posterior_mean_factor;
  j["oracle_mbmse"] = oracle.mbmse;
  j["oracle_max_defect"] = states.max_defect();
  j["prior_variance"] = prior.variance();
  j["monte_carlo"] = {{"quadrature", mc_json(quad)}, {"counting", mc_json(count)}};
  return j;
}

void run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output);
  std::vector<std::string> outputs;
  const std::string& e = config.experiment;
  if (e == "fig2") {
    write_fig2(config, outputs);
  } else if (e == "fig3") {
    write_fig3(config, outputs);
  } else if (e == "displacement") {
    write_json(config.output / "displacement.json", displacement_result(config));
    outputs.push_back("displacement.json");
  } else if (e == "phase") {
    write_phase(config, outputs);
  } else if (e == "whitening-ratio") {
    write_ratio(config, outputs);
  } else if (e == "rank-sweep") {
    write_rank_sweep(config, outputs);
  } else if (e == "oracle-check") {
    write_oracle(config, outputs);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown experiment '" + e + "'");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json manifest;
  manifest["experiment"] = e;
  manifest["version"] = kVersion;
  manifest["config"] = config.to_json();
  manifest["outputs"] = outputs;
  manifest["wall_time_s"] = wall;
  manifest["bins_convention"] = "M = ceil(T/dt) + 1, left-endpoint samples";
  write_json(config.output / "manifest.json", manifest);
}

}  // namespace bqlcli
