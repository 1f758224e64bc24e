#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bql/io.hpp"
#include "doctest.h"

using namespace bql;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bql_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_double round-trips and names non-finite values") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("two-column CSV round-trip keeps comments, header and values") {
  const auto path = scratch("two.csv");
  const std::vector<double> xs = {0.0, 0.5, 1.0 / 3.0};
  const std::vector<double> ys = {1.0, -2.0, 1e-17};
  write_two_column_csv(path, {"k", "rad/s"}, {"g", "s"}, xs, ys, {"dc_atom=0.25"});
  const TwoColumnData d = read_two_column_csv(path);
  REQUIRE(d.comments.size() == 1);
  CHECK(d.comments[0] == "dc_atom=0.25");
  REQUIRE(d.header.size() == 2);
  CHECK(d.header[0] == "k [rad/s]");
  CHECK(d.header[1] == "g [s]");
  CHECK(d.x == xs);
  CHECK(d.y == ys);
  CHECK(slurp(path).rfind("# dc_atom=0.25\nk [rad/s],g [s]\n", 0) == 0);
  CHECK_THROWS(write_two_column_csv(path, {"a", "1"}, {"b", "1"}, {1.0}, {1.0, 2.0}));
}

TEST_CASE("spectral measure CSV records the atom") {
  SpectralMeasure g;
  g.k = {-1.0, 0.0, 1.0};
  g.g = {0.1, 0.2, 0.1};
  g.dc_atom = 0.4;
  const auto path = scratch("spectral.csv");
  write_spectral_measure_csv(path, g);
  const TwoColumnData d = read_two_column_csv(path);
  CHECK(d.x == g.k);
  CHECK(d.y == g.g);
  bool found = false;
  for (const auto& c : d.comments) found = found || c.find("dc_atom=0.4") != std::string::npos;
  CHECK(found);
}

TEST_CASE("symbol and kernel CSVs") {
  ToeplitzSymbol sym;
  sym.G = [](double x) { return cplx(std::exp(-x * x)); };
  const auto path = scratch("symbol.csv");
  write_symbol_csv(path, sym, {0.0, 1.0});
  const TwoColumnData d = read_two_column_csv(path);
  CHECK(d.y[0] == 1.0);
  CHECK(d.y[1] == std::exp(-1.0));
  WhiteningKernel K;
  K.lag = {-1.0, 0.0, 1.0};
  K.density = {0.2, 0.6, 0.2};
  write_kernel_csv(scratch("kernel.csv"), K);
  CHECK(read_two_column_csv(scratch("kernel.csv")).y == K.density);
}

TEST_CASE("basis dump writes eigenvalues and metadata") {
  WaveformBasis b;
  b.U = Eigen::MatrixXcd::Identity(3, 2);
  b.S = Eigen::Vector2d(2.0, 0.5);
  b.tau = 1e-8;
  b.grid = {0.0, 1.0, 2.0};
  const auto stem = scratch("basis");
  write_basis(stem, b, {{"snr", 3.0}});
  const auto S = read_two_column_csv(stem.string() + "_S.csv");
  CHECK(S.y == std::vector<double>{2.0, 0.5});
  const auto j = read_json(stem.string() + ".json");
  CHECK(j["r"] == 2);
  CHECK(j["n"] == 3);
  CHECK(j["problem"]["snr"] == 3.0);
}

TEST_CASE("solution JSON carries the scalar results") {
  BayesSolution s;
  s.mbmse = 0.125;
  s.mbmse_trace_route = 0.125;
  s.prior_variance = 0.5;
  s.retained = 3;
  s.rho_eigenvalues = Eigen::Vector3d(0.1, 0.3, 0.6);
  const auto j = solution_json(s);
  CHECK(j["mbmse"] == 0.125);
  CHECK(j["prior_variance"] == 0.5);
  CHECK(j["retained"] == 3);
  const auto path = scratch("solution.json");
  write_json(path, j);
  CHECK(read_json(path) == j);
}

TEST_CASE("sweep CSV round-trip") {
  const std::vector<SweepRow> rows = {
      {0.5, "TimeQuadrature", 0.1, 0.01, 0.05, 0.02, 0.2, 12},
      {20.0, "Optimal", 1e-5, 0.0, 1e-5, 1e-6, 0.2, 300},
      {1.0, "Prior", std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0, 0.2, 0},
  };
  const auto path = scratch("sweep.csv");
  write_sweep_csv(path, rows);
  CHECK(slurp(path).rfind("snr,scheme,bmse,se,mbmse,qcrb,prior_var,rank\n", 0) == 0);
  CHECK(read_sweep_csv(path) == rows);
}
