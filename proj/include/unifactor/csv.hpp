#pragma once

// Matrix CSV: comma separated, '.' decimal point, one optional header row.
// Numbers are written with 17 significant digits so they round-trip.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "unifactor/errors.hpp"
#include "unifactor/matrix.hpp"

namespace unifactor::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

/// Parses a full field as a double (scientific notation accepted).
inline std::optional<double> parse_number(std::string_view field) {
  const std::string s(trim(field));
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Rows of numbers. The first non-empty line is skipped as a header if any of
/// its fields is not numeric; any later non-numeric field is an error.
inline std::vector<std::vector<double>> read_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (auto field : split(line)) {
      auto v = parse_number(field);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InvalidMatrix("csv: non-numeric field on line " + std::to_string(line_no));
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Square matrix with finite entries.
inline Matrix read_matrix(std::istream& in) {
  const auto rows = read_rows(in);
  const std::size_t p = rows.size();
  if (p == 0) throw InvalidMatrix("csv: no data rows");
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    if (rows[i].size() != p)
      throw InvalidMatrix("csv: matrix is not square (row " + std::to_string(i) + " has " +
                          std::to_string(rows[i].size()) + " fields, expected " +
                          std::to_string(p) + ")");
    for (std::size_t j = 0; j < p; ++j) {
      if (!std::isfinite(rows[i][j])) throw InvalidMatrix("csv: non-finite entry");
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

inline Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_matrix(in);
}

/// All numbers in the file, row after row (loadings may be one line or one per line).
inline std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::vector<double> out;
  for (const auto& row : read_rows(in)) out.insert(out.end(), row.begin(), row.end());
  return out;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace unifactor::csv
