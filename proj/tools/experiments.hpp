#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "bql/bayes.hpp"
#include "bql/io.hpp"
#include "bql/measurements.hpp"
#include "bql/whitening.hpp"
#include "config.hpp"

namespace bqlcli {

/** Runs fn(0..count-1) on a pool of workers; results are stored by index so output order is fixed. */
template <typename Result>
std::vector<Result> run_pool(std::size_t count, std::size_t threads, const std::function<Result(std::size_t)>& fn) {
  std::vector<Result> out(count);
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/** A with SNR = A sqrt(2T). */
double amplitude_for_snr(double snr, double T);

/** Windowed sinusoid on (0, T), exact overlaps, flat prior over the configured band with n cells. */
bql::EstimationProblem frequency_problem(double A, double T, double omega_min, double omega_max, std::size_t n,
                                         double dt, double phi = 0.0);
bql::EstimationProblem frequency_problem(const ExperimentConfig& config, double snr, std::size_t n);

struct SchemeEstimate {
  std::string name;
  bql::McResult result;
};

struct Fig3Point {
  double snr = 0.0;
  double amplitude = 0.0;
  double mbmse = 0.0;
  double prior_var = 0.0;
  double qcrb = 0.0;
  long rank = 0;
  bql::BayesSolution solution;
  std::vector<SchemeEstimate> schemes;
};

std::vector<bql::MeasurementScheme> fig3_schemes();

Fig3Point fig3_point(const ExperimentConfig& config, double snr, const std::vector<bql::MeasurementScheme>& schemes);

/** One row per scheme plus Optimal (the MBMSE), QCRB and Prior reference rows. */
std::vector<bql::SweepRow> fig3_rows(const Fig3Point& point);

struct Fig2Analysis {
  bql::ToeplitzSymbol symbol;
  bql::SpectralMeasure measure;
  bql::DivergenceDiagnosis diagnosis;
  bql::LowSnrTerms terms;
  double step_plus = 0.0;
  double step_minus = 0.0;
  /** Mean density on (T/4, 3T/4). */
  double plateau = 0.0;
};

/** Jump of g across k0 from straight-line fits on both sides. */
double step_height(const bql::SpectralMeasure& g, double k0, double fit_width, double gap);

Fig2Analysis fig2_analysis(double A, double T, double dk);

struct OracleComparison {
  double snr = 0.0;
  double pipeline = 0.0;
  double oracle = 0.0;
  double relative_difference = 0.0;
  double max_defect = 0.0;
  long rank = 0;
};

OracleComparison oracle_check(const ExperimentConfig& config, double snr);

struct PhaseRow {
  double mu = 0.0;
  double holevo = 0.0;
  double squared_error = 0.0;
  double normalization = 0.0;
};

PhaseRow phase_row(double mu);

long rank_at(const ExperimentConfig& config, double snr, std::size_t n);

/** Displacement toy: closed forms, Fock-oracle MBMSE and Monte Carlo estimates. */
nlohmann::json displacement_result(const ExperimentConfig& config);

/** Runs config.experiment, writes its outputs and manifest.json under config.output. */
void run(const ExperimentConfig& config);

}  // namespace bqlcli
