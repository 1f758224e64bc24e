#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "bql/error.hpp"

namespace bqlcli {

using bql::Error;
using bql::ErrorCode;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected a nonnegative integer, got '" + v + "'");
  }
}

std::vector<std::string> list_items(const std::string& v) {
  std::string s = trim(v);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : list_items(v)) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& item : list_items(v)) out.push_back(static_cast<std::size_t>(to_uint(key, item)));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter number_field(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_floating_point_v<T>) {
      c.*field = to_double(k, v);
    } else {
      c.*field = static_cast<T>(to_uint(k, v));
    }
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.experiment = v; }},
      {"T", number_field(&ExperimentConfig::T)},
      {"delta_omega", number_field(&ExperimentConfig::delta_omega)},
      {"omega0", number_field(&ExperimentConfig::omega0)},
      {"phi", number_field(&ExperimentConfig::phi)},
      {"dt", number_field(&ExperimentConfig::dt)},
      {"n", number_field(&ExperimentConfig::n)},
      {"snr", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.snr = to_doubles(k, v); }},
      {"tau", number_field(&ExperimentConfig::tau)},
      {"trials", number_field(&ExperimentConfig::trials)},
      {"seed", number_field(&ExperimentConfig::seed)},
      {"threads", number_field(&ExperimentConfig::threads)},
      {"output", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output = v; }},
      {"amplitude", number_field(&ExperimentConfig::amplitude)},
      {"sigma", number_field(&ExperimentConfig::sigma)},
      {"fock_dim", number_field(&ExperimentConfig::fock_dim)},
      {"mu", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.mu = to_doubles(k, v); }},
      {"decades", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.decades = to_doubles(k, v); }},
      {"omega_lo", number_field(&ExperimentConfig::omega_lo)},
      {"sizes", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sizes = to_sizes(k, v); }},
      {"bins", number_field(&ExperimentConfig::bins)},
      {"oracle_n", number_field(&ExperimentConfig::oracle_n)},
      {"oracle_d", number_field(&ExperimentConfig::oracle_d)},
      {"oracle_T", number_field(&ExperimentConfig::oracle_T)},
      {"oracle_omega0", number_field(&ExperimentConfig::oracle_omega0)},
      {"oracle_delta_omega", number_field(&ExperimentConfig::oracle_delta_omega)},
  };
  return table;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& item : v) {
      if (!s.empty()) s += ",";
      s += json_scalar(item);
    }
    return s;
  }
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fig2",           "fig3",       "displacement", "phase",
                                                 "whitening-ratio", "rank-sweep", "oracle-check"};
  return names;
}

void ExperimentConfig::validate() const {
  require(T > 0.0, "T must be positive");
  require(delta_omega > 0.0, "delta_omega must be positive");
  require(omega_min() > 0.0, "omega0 - delta_omega/2 must be positive");
  require(dt > 0.0, "dt must be positive");
  require(n >= 2, "n must be at least 2");
  require(!snr.empty(), "the SNR list is empty");
  for (double s : snr) require(s >= 0.0, "SNR values must be nonnegative");
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(trials >= 100, "trials must be at least 100");
  require(threads >= 1, "threads must be at least 1");
  require(amplitude >= 0.0, "amplitude must be nonnegative");
  require(sigma > 0.0, "sigma must be positive");
  require(fock_dim >= 2, "fock_dim must be at least 2");
  require(!mu.empty(), "the mu list is empty");
  require(!decades.empty(), "the decades list is empty");
  for (double d : decades) require(d > 0.0, "decades must be positive");
  require(omega_lo > 0.0, "omega_lo must be positive");
  require(!sizes.empty(), "the sizes list is empty");
  for (auto s : sizes) require(s >= 2, "grid sizes must be at least 2");
  require(bins >= 1 && oracle_n >= 2 && oracle_d >= 2, "oracle bins, grid and Fock dimension must be positive");
  require(oracle_T > 0.0 && oracle_delta_omega > 0.0, "oracle T and delta_omega must be positive");
  require(oracle_omega0 - 0.5 * oracle_delta_omega > 0.0, "oracle frequency band must be positive");
  if (!experiment.empty()) {
    const auto& names = experiment_names();
    require(std::find(names.begin(), names.end(), experiment) != names.end(), "unknown experiment " + experiment);
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["T"] = T;
  j["delta_omega"] = delta_omega;
  j["omega0"] = omega0;
  j["phi"] = phi;
  j["dt"] = dt;
  j["n"] = n;
  j["snr"] = snr;
  j["tau"] = tau;
  j["trials"] = trials;
  j["seed"] = seed;
  j["threads"] = threads;
  j["output"] = output.string();
  j["amplitude"] = amplitude;
  j["sigma"] = sigma;
  j["fock_dim"] = fock_dim;
  j["mu"] = mu;
  j["decades"] = decades;
  j["omega_lo"] = omega_lo;
  j["sizes"] = sizes;
  j["bins"] = bins;
  j["oracle_n"] = oracle_n;
  j["oracle_d"] = oracle_d;
  j["oracle_T"] = oracle_T;
  j["oracle_omega0"] = oracle_omega0;
  j["oracle_delta_omega"] = oracle_delta_omega;
  return j;
}

void set_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  it->second(config, key, trim(value));
}

void load_ini(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read config " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(lineno) + ": bad section header");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    set_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void load_json(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
  if (j.contains("config")) j = j["config"];
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, path.string() + ": expected an object of keys");
  for (const auto& [key, value] : j.items()) set_value(config, key, json_scalar(value));
}

void load_config(ExperimentConfig& config, const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    load_json(config, path);
  } else {
    load_ini(config, path);
  }
}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv(kOutputEnv);
  if (env != nullptr && *env != '\0') return env;
  return ".";
}

}  // namespace bqlcli
