#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bql/error.hpp"
#include "config.hpp"
#include "doctest.h"
#include "experiments.hpp"

using namespace bqlcli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bql_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BQL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("default configuration is valid and serializes every key") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.omega_min() == doctest::Approx(2.0 * 3.141592653589793 * 0.05));
  const auto j = c.to_json();
  CHECK(j["n"] == 300);
  CHECK(j["snr"].size() == 13);
}

TEST_CASE("set_value parses scalars and lists and rejects unknown keys") {
  ExperimentConfig c;
  set_value(c, "T", "2.5");
  set_value(c, "snr", "1, 2,3");
  set_value(c, "sizes", "10,20");
  set_value(c, "seed", "42");
  CHECK(c.T == 2.5);
  CHECK(c.snr == std::vector<double>{1, 2, 3});
  CHECK(c.sizes == std::vector<std::size_t>{10, 20});
  CHECK(c.seed == 42);
  CHECK_THROWS_AS(set_value(c, "nonsense", "1"), bql::Error);
  CHECK_THROWS_AS(set_value(c, "T", "abc"), bql::Error);
}

TEST_CASE("empty SNR list is rejected") {
  ExperimentConfig c;
  c.snr.clear();
  try {
    c.validate();
    FAIL("expected InvalidArgument");
  } catch (const bql::Error& e) {
    CHECK(e.code() == bql::ErrorCode::InvalidArgument);
  }
  c = ExperimentConfig{};
  c.experiment = "nope";
  CHECK_THROWS_AS(c.validate(), bql::Error);
}

TEST_CASE("INI and JSON configs load the same values") {
  const auto dir = fresh_dir("configs");
  {
    std::ofstream ini(dir / "c.ini");
    ini << "[run]\n# comment\nT = 3\nsnr = 1,2 ; trailing\nn=20\n";
    std::ofstream js(dir / "c.json");
    js << R"({"config": {"T": 3, "snr": [1, 2], "n": 20}})";
  }
  ExperimentConfig a;
  ExperimentConfig b;
  load_config(a, dir / "c.ini");
  load_config(b, dir / "c.json");
  CHECK(a.T == 3.0);
  CHECK(a.snr == std::vector<double>{1, 2});
  CHECK(a.to_json() == b.to_json());
  {
    std::ofstream bad(dir / "bad.ini");
    bad << "T 3\n";
  }
  CHECK_THROWS_AS(load_config(a, dir / "bad.ini"), bql::Error);
}

TEST_CASE("amplitude for a target SNR") {
  CHECK(amplitude_for_snr(2.0, 8.0) == doctest::Approx(0.5));
  CHECK(amplitude_for_snr(0.0, 8.0) == 0.0);
}

TEST_CASE("manifest config reproduces byte-identical outputs") {
  ExperimentConfig c;
  c.experiment = "fig3";
  c.snr = {2.0, 8.0};
  c.n = 40;
  c.T = 4.0;
  c.trials = 200;
  c.output = fresh_dir("first");
  run(c);
  const auto manifest = bql::read_json(c.output / "manifest.json");
  CHECK(manifest["experiment"] == "fig3");
  CHECK(manifest["version"] == kVersion);
  REQUIRE(manifest["outputs"].size() >= 1);

  ExperimentConfig again;
  load_config(again, c.output / "manifest.json");
  again.output = fresh_dir("second");
  run(again);
  for (const auto& name : manifest["outputs"]) {
    const std::string file = name.get<std::string>();
    CHECK_MESSAGE(slurp(c.output / file) == slurp(again.output / file), file);
  }
  const auto rows = bql::read_sweep_csv(c.output / "fig3_sweep.csv");
  CHECK(rows.size() >= 2 * 4);
}

TEST_CASE("cheap experiments write their declared outputs") {
  for (const std::string name : {"whitening-ratio", "phase", "fig2"}) {
    ExperimentConfig c;
    c.experiment = name;
    c.mu = {0.25, 4.0};
    c.output = fresh_dir(name);
    run(c);
    const auto manifest = bql::read_json(c.output / "manifest.json");
    for (const auto& f : manifest["outputs"]) CHECK(fs::exists(c.output / f.get<std::string>()));
  }
}

TEST_CASE("command line honours the output variable and reports errors through exit codes") {
  const auto dir = fresh_dir("env");
  const std::string env = std::string(kOutputEnv) + "=" + dir.string() + " ";
  CHECK(std::system((env + BQL_CLI_PATH + " whitening-ratio >/dev/null 2>&1").c_str()) == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(run_cli("whitening-ratio --output " + (dir / "flag").string()) == 0);
  CHECK(fs::exists(dir / "flag" / "manifest.json"));
  CHECK(run_cli("no-such-experiment") == 2);
  CHECK(run_cli("fig3 --snr '' --output " + dir.string()) == 2);
  CHECK(run_cli("fig3 --n 1 --output " + dir.string()) == 2);
}

TEST_CASE("displacement experiment reports the closed forms") {
  ExperimentConfig c;
  c.experiment = "displacement";
  c.sigma = 1.0;
  c.trials = 2000;
  c.output = fresh_dir("displacement");
  run(c);
  const auto j = bql::read_json(c.output / "displacement.json");
  CHECK(j["quadrature"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(j["counting"].get<double>() == doctest::Approx(1.0));
  CHECK(j["mbmse"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(j["oracle_mbmse"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("fig3 sweep lists every scheme at every SNR") {
  ExperimentConfig c;
  c.experiment = "fig3";
  c.snr = {1.0, 4.0};
  c.n = 40;
  c.trials = 200;
  c.output = fresh_dir("fig3_rows");
  run(c);
  const auto rows = bql::read_sweep_csv(c.output / "fig3_sweep.csv");
  for (double snr : c.snr) {
    std::vector<std::string> seen;
    for (const auto& r : rows)
      if (r.snr == snr) seen.push_back(r.scheme);
    for (const std::string s : {"TimeQuadrature", "TimeCounting", "FourierCounting", "Optimal", "QCRB", "Prior"}) {
      CHECK_MESSAGE(std::find(seen.begin(), seen.end(), s) != seen.end(), s);
    }
  }
}
