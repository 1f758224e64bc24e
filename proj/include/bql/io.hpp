#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bql/bayes.hpp"
#include "bql/geometry.hpp"
#include "bql/subspace.hpp"
#include "bql/whitening.hpp"
#include "json.hpp"

namespace bql {

/** Shortest decimal text that parses back to the same double. */
std::string format_double(double x);

struct Column {
  std::string name;
  std::string unit;
};

/** Header "name [unit],name [unit]" preceded by optional "# " comment lines. */
void write_two_column_csv(const std::filesystem::path& path, const Column& x, const Column& y,
                          const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<std::string>& comments = {});

struct TwoColumnData {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<double> x;
  std::vector<double> y;
};

TwoColumnData read_two_column_csv(const std::filesystem::path& path);

/** Real part of the symbol on the lags. */
void write_symbol_csv(const std::filesystem::path& path, const ToeplitzSymbol& symbol, const std::vector<double>& lags);
/** k and g(k); the DC atom is written as a "# dc_atom=" comment. */
void write_spectral_measure_csv(const std::filesystem::path& path, const SpectralMeasure& g);
void write_kernel_csv(const std::filesystem::path& path, const WhiteningKernel& kernel);

/** Writes <stem>_S.csv (index, eigenvalue) and <stem>.json (n, r, tau, metadata). */
void write_basis(const std::filesystem::path& stem, const WaveformBasis& basis, const nlohmann::json& metadata);

nlohmann::json solution_json(const BayesSolution& solution);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

struct SweepRow {
  double snr = 0.0;
  std::string scheme;
  double bmse = 0.0;
  double se = 0.0;
  double mbmse = 0.0;
  double qcrb = 0.0;
  double prior_var = 0.0;
  long rank = 0;

  bool operator==(const SweepRow&) const = default;
};

/** Columns snr,scheme,bmse,se,mbmse,qcrb,prior_var,rank. */
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

}  // namespace bql
