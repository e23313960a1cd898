#include "cnd/io.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>

#include "cnd/error.hpp"

namespace cnd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<double> parse_row(std::string_view line, const std::string& where) {
  std::vector<double> row;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    auto field = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc() || ptr != last)
      throw InputError(where + ": non-numeric field '" + std::string(field) + "'");
    row.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    rows.push_back(parse_row(line, where));
    if (rows.size() > 1 && rows.back().size() != rows.front().size())
      throw InputError(where + ": expected " + std::to_string(rows.front().size()) + " fields, got " +
                       std::to_string(rows.back().size()));
  }
  if (rows.empty()) throw InputError(path.string() + ": empty CSV");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
  Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.rows() == 1) return m.row(0).transpose();
  if (m.cols() == 1) return m.col(0);
  throw InputError(path.string() + ": expected a single row or column");
}

void write_trace_csv(std::span<const double> trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "iter,objective\n";
  for (size_t t = 0; t < trace.size(); ++t) out << t << ',' << trace[t] << '\n';
}

}  // namespace cnd
