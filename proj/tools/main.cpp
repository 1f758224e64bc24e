#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "bql/error.hpp"
#include "config.hpp"
#include "experiments.hpp"

namespace {

const std::map<std::string, std::string>& key_help() {
  static const std::map<std::string, std::string> help = {
      {"T", "signal duration (s)"},
      {"delta_omega", "prior width (rad/s)"},
      {"omega0", "prior centre (rad/s)"},
      {"phi", "signal phase (rad)"},
      {"dt", "time-bin width (s)"},
      {"n", "parameter grid size"},
      {"snr", "comma-separated SNR values A sqrt(2T)"},
      {"tau", "relative eigenvalue threshold"},
      {"trials", "Monte Carlo trials per point"},
      {"seed", "random seed"},
      {"threads", "worker threads"},
      {"output", "output directory"},
      {"amplitude", "signal amplitude (Hz^1/2)"},
      {"sigma", "displacement prior width"},
      {"fock_dim", "Fock truncation for the displacement oracle"},
      {"mu", "comma-separated phase rates A^2 T / 2"},
      {"decades", "comma-separated prior spans in decades"},
      {"omega_lo", "lower prior edge for decade widths (rad/s)"},
      {"sizes", "comma-separated grid sizes for rank-sweep"},
      {"bins", "oracle time bins"},
      {"oracle_n", "oracle grid size"},
      {"oracle_d", "oracle Fock truncation"},
      {"oracle_T", "oracle duration (s)"},
      {"oracle_omega0", "oracle prior centre (rad/s)"},
      {"oracle_delta_omega", "oracle prior width (rad/s)"},
  };
  return help;
}

void print_error(const std::string& code, const std::string& message) {
  nlohmann::json j{{"error", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian quantum limits for waveform parameter estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bqlcli::kVersion));

  struct Sub {
    CLI::App* app;
    std::optional<std::string> config;
    std::map<std::string, std::optional<std::string>> values;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  for (const auto& name : bqlcli::experiment_names()) {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(name, "run the " + name + " experiment");
    sub->app->add_option("--config", sub->config, "key = value or JSON config/manifest file");
    for (const auto& [key, help] : key_help()) {
      sub->app->add_option("--" + key, sub->values[key], help);
    }
    subs.push_back(std::move(sub));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("Usage", e.what());
    return 2;
  }

  for (const auto& sub : subs) {
    if (!sub->app->parsed()) continue;
    bqlcli::ExperimentConfig config;
    config.output = bqlcli::default_output_dir();
    try {
      if (sub->config) bqlcli::load_config(config, *sub->config);
      for (const auto& [key, value] : sub->values) {
        if (value) bqlcli::set_value(config, key, *value);
      }
      config.experiment = sub->app->get_name();
      config.validate();
    } catch (const bql::Error& e) {
      print_error("Usage", e.what());
      return 2;
    }
    try {
      bqlcli::run(config);
    } catch (const bql::Error& e) {
      print_error(std::string(bql::to_string(e.code())), e.what());
      return 1;
    } catch (const std::exception& e) {
      print_error("Internal", e.what());
      return 1;
    }
    std::cout << (config.output / "manifest.json").string() << '\n';
  }
  return 0;
}
