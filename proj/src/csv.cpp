#include "qntk/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qntk/error.hpp"

namespace qntk {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text, std::size_t line) {
  const std::string s(text);
  if (s.empty()) throw ParseError("empty numeric field", line);
  if (std::isspace(static_cast<unsigned char>(s[0]))) throw ParseError("not a number: '" + s + "'", line);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError("not a number: '" + s + "'", line);
  if (errno == ERANGE && std::isinf(v)) throw ParseError("number out of range: '" + s + "'", line);
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_double(values[i]);
  }
  out << '\n';
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
  if (trace.steps.empty()) throw ValidationError("empty training trace");
  const auto& first = trace.steps.front();
  out << "t,loss";
  for (Eigen::Index i = 0; i < first.eps.size(); ++i) out << ",eps_" << i;
  for (std::size_t l = 0; l < first.theta.size(); ++l) out << ",theta_" << l;
  out << '\n';
  std::vector<double> row;
  for (const auto& s : trace.steps) {
    row.assign({static_cast<double>(s.t), s.loss});
    row.insert(row.end(), s.eps.data(), s.eps.data() + s.eps.size());
    row.insert(row.end(), s.theta.begin(), s.theta.end());
    write_row(out, row);
  }
}

void write_spectrum_csv(std::ostream& out, std::span<const KernelSnapshot> snapshots) {
  std::size_t n = 0;
  for (const auto& s : snapshots) n = std::max(n, s.eigenvalues.size());
  out << 't';
  for (std::size_t k = 1; k <= n; ++k) out << ",lambda_" << k;
  out << '\n';
  std::vector<double> row;
  for (const auto& s : snapshots) {
    if (s.eigenvalues.size() != n) throw DimensionError("spectrum rows differ in length");
    row.assign(1, static_cast<double>(s.t));
    row.insert(row.end(), s.eigenvalues.begin(), s.eigenvalues.end());
    write_row(out, row);
  }
}

void write_spectrum_csv(std::ostream& out, const TrainingTrace& trace) {
  std::vector<KernelSnapshot> snaps;
  for (const auto& s : trace.steps)
    if (!s.kernel_eigenvalues.empty()) snaps.push_back({s.t, s.kernel_eigenvalues});
  write_spectrum_csv(out, snaps);
}

void write_series_csv(std::ostream& out, std::span<const std::string> names, std::span<const Eigen::MatrixXd> blocks) {
  if (blocks.empty()) throw ValidationError("no series to write");
  const Eigen::Index rows = blocks[0].rows();
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw DimensionError("series blocks differ in length");
    cols += static_cast<std::size_t>(b.cols());
  }
  if (names.size() != cols) throw DimensionError("series names do not match the column count");
  out << 't';
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  std::vector<double> row;
  for (Eigen::Index t = 0; t < rows; ++t) {
    row.assign(1, static_cast<double>(t));
    for (const auto& b : blocks)
      for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back(b(t, c));
    write_row(out, row);
  }
}

void write_file(const std::string& path, std::string_view contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace qntk
