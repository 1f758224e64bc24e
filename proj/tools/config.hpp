#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace bqlcli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputEnv = "BQL_OUTPUT_DIR";

const std::vector<std::string>& experiment_names();

/** Parameters of every experiment; defaults reproduce the reference frequency-estimation setup. */
struct ExperimentConfig {
  std::string experiment;

  double T = 10.0;
  double delta_omega = 2.0 * 3.141592653589793 * 0.9;
  double omega0 = 2.0 * 3.141592653589793 * 0.5;
  double phi = 0.0;
  double dt = 0.1;
  std::size_t n = 300;
  std::vector<double> snr = {0.5, 1, 2, 3, 4, 4.5, 5, 6, 8, 10, 12, 16, 20};
  double tau = 1e-8;

  std::size_t trials = 20000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::filesystem::path output = ".";

  double amplitude = 1.0;
  double sigma = 1.0;
  std::size_t fock_dim = 30;
  std::vector<double> mu = {0.25, 1, 4, 16};
  std::vector<double> decades = {2, 4};
  double omega_lo = 2.0 * 3.141592653589793 * 0.05;
  std::vector<std::size_t> sizes = {300, 600};
  std::size_t bins = 5;
  std::size_t oracle_n = 40;
  std::size_t oracle_d = 8;
  double oracle_T = 1.0;
  double oracle_omega0 = 2.0 * 3.141592653589793;
  double oracle_delta_omega = 2.0 * 3.141592653589793 * 1.5;

  double omega_min() const { return omega0 - 0.5 * delta_omega; }
  double omega_max() const { return omega0 + 0.5 * delta_omega; }

  /** Throws bql::Error(InvalidArgument) on non-physical values or an empty SNR list. */
  void validate() const;
  nlohmann::json to_json() const;
};

/** Applies one key = value assignment; throws on unknown keys or malformed values. */
void set_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/** key = value lines grouped in [section] blocks; '#' and ';' start comments. */
void load_ini(ExperimentConfig& config, const std::filesystem::path& path);
/** Either a flat object of keys or a manifest holding them under "config". */
void load_json(ExperimentConfig& config, const std::filesystem::path& path);
/** Dispatches on the file extension (.json or anything else). */
void load_config(ExperimentConfig& config, const std::filesystem::path& path);

/** BQL_OUTPUT_DIR when set, otherwise the current directory. */
std::filesystem::path default_output_dir();

}  // namespace bqlcli
