#include "bql/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bql/error.hpp"

namespace bql {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  }
  return v;
}

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_two_column_csv(const std::filesystem::path& path, const Column& x, const Column& y,
                          const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<std::string>& comments) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "column lengths differ");
  auto out = open_out(path);
  for (const auto& c : comments) out << "# " << c << '\n';
  out << x.name << " [" << x.unit << "]," << y.name << " [" << y.unit << "]\n";
  for (std::size_t i = 0; i < xs.size(); ++i) out << format_double(xs[i]) << ',' << format_double(ys[i]) << '\n';
}

TwoColumnData read_two_column_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  TwoColumnData d;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      d.comments.push_back(line.substr(2));
      continue;
    }
    if (d.header.empty()) {
      d.header = split(line, ',');
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw Error(ErrorCode::InvalidArgument, "expected two columns: " + line);
    d.x.push_back(parse_double(cells[0]));
    d.y.push_back(parse_double(cells[1]));
  }
  return d;
}

void write_symbol_csv(const std::filesystem::path& path, const ToeplitzSymbol& symbol, const std::vector<double>& lags) {
  std::vector<double> values(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) values[i] = std::real(symbol(lags[i]));
  write_two_column_csv(path, {"theta", "rad/s"}, {"G", "1"}, lags, values, {"symbol=" + symbol.name});
}

void write_spectral_measure_csv(const std::filesystem::path& path, const SpectralMeasure& g) {
  write_two_column_csv(path, {"k", "s"}, {"g", "1/s"}, g.k, g.g, {"dc_atom=" + format_double(g.dc_atom)});
}

void write_kernel_csv(const std::filesystem::path& path, const WhiteningKernel& kernel) {
  write_two_column_csv(path, {"lag", "rad/s"}, {"density", "s/rad"}, kernel.lag, kernel.density,
                       {"normalization=" + format_double(kernel.normalization)});
}

void write_basis(const std::filesystem::path& stem, const WaveformBasis& basis, const nlohmann::json& metadata) {
  std::vector<double> idx(static_cast<std::size_t>(basis.rank()));
  std::vector<double> s(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = static_cast<double>(i);
    s[i] = basis.S(static_cast<Eigen::Index>(i));
  }
  auto csv = stem;
  csv += "_S.csv";
  write_two_column_csv(csv, {"index", "1"}, {"eigenvalue", "1"}, idx, s);
  nlohmann::json j;
  j["n"] = basis.size();
  j["r"] = basis.rank();
  j["tau"] = basis.tau;
  j["largest_eigenvalue"] = basis.largest_eigenvalue;
  j["discarded_norm"] = basis.discarded_norm;
  j["problem"] = metadata;
  auto js = stem;
  js += ".json";
  write_json(js, j);
}

nlohmann::json solution_json(const BayesSolution& s) {
  nlohmann::json j;
  std::vector<double> spectrum(s.rho_eigenvalues.data(), s.rho_eigenvalues.data() + s.rho_eigenvalues.size());
  j["rho_spectrum"] = spectrum;
  j["mbmse"] = number(s.mbmse);
  j["mbmse_trace_route"] = number(s.mbmse_trace_route);
  j["prior_variance"] = number(s.prior_variance);
  j["epsilon"] = s.epsilon;
  j["lyapunov_residual"] = s.lyapunov_residual;
  j["trace_defect"] = s.trace_defect;
  j["retained"] = s.retained;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  out << "snr,scheme,bmse,se,mbmse,qcrb,prior_var,rank\n";
  for (const auto& r : rows) {
    out << format_double(r.snr) << ',' << r.scheme << ',' << format_double(r.bmse) << ',' << format_double(r.se) << ','
        << format_double(r.mbmse) << ',' << format_double(r.qcrb) << ',' << format_double(r.prior_var) << ',' << r.rank
        << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "snr,scheme,bmse,se,mbmse,qcrb,prior_var,rank") {
    throw Error(ErrorCode::InvalidArgument, "unexpected sweep header in " + path.string());
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 8) throw Error(ErrorCode::InvalidArgument, "sweep row needs 8 columns: " + line);
    SweepRow r;
    r.snr = parse_double(c[0]);
    r.scheme = c[1];
    r.bmse = parse_double(c[2]);
    r.se = parse_double(c[3]);
    r.mbmse = parse_double(c[4]);
    r.qcrb = parse_double(c[5]);
    r.prior_var = parse_double(c[6]);
    r.rank = std::stol(c[7]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace bql
