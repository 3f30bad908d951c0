#include "rotrook/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace rotrook {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

double parse_real(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a real number, got '" + tok + "'");
  }
  if (used != tok.size())
    throw ParseError(line, "trailing characters in number '" + tok + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + tok + "'");
  return v;
}

std::size_t parse_count(const std::string& tok, std::size_t line) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) {
        return std::isdigit(c);
      })) {
    throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
  }
  return static_cast<std::size_t>(std::stoull(tok));
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Reads the next non-comment, non-blank line; returns false at EOF.
bool next_data_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (blank(line)) continue;
    return true;
  }
  return false;
}

DenseVector read_mm_array(std::istream& in, std::size_t& lineno) {
  std::string line;
  if (!next_data_line(in, line, lineno))
    throw ParseError(lineno, "missing size line");
  auto t = tokens(line);
  if (t.size() != 2) throw ParseError(lineno, "array size line needs 'rows cols'");
  const std::size_t rows = parse_count(t[0], lineno);
  const std::size_t cols = parse_count(t[1], lineno);
  if (cols != 1) throw ParseError(lineno, "right-hand side must have one column");
  DenseVector v;
  v.reserve(rows);
  while (v.size() < rows) {
    if (!next_data_line(in, line, lineno))
      throw ParseError(lineno, "expected " + std::to_string(rows) +
                                   " values, found " + std::to_string(v.size()));
    for (const auto& tok : tokens(line)) v.push_back(parse_real(tok, lineno));
  }
  if (v.size() != rows) throw ParseError(lineno, "too many values");
  if (next_data_line(in, line, lineno)) throw ParseError(lineno, "unexpected trailing data");
  return v;
}

}  // namespace

PackedSymMatrix read_matrix_market(std::istream& in) {
  std::size_t lineno = 0;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++lineno;
  const auto head = tokens(lower(line));
  if (head.size() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" ||
      head[2] != "coordinate" || head[3] != "real" || head[4] != "symmetric") {
    throw ParseError(lineno,
                     "bad header, expected '%%MatrixMarket matrix coordinate "
                     "real symmetric'");
  }
  if (!next_data_line(in, line, lineno)) throw ParseError(lineno, "missing size line");
  auto t = tokens(line);
  if (t.size() != 3) throw ParseError(lineno, "size line needs 'rows cols nnz'");
  const std::size_t rows = parse_count(t[0], lineno);
  const std::size_t cols = parse_count(t[1], lineno);
  const std::size_t nnz = parse_count(t[2], lineno);
  if (rows != cols) throw ParseError(lineno, "symmetric matrix must be square");
  if (rows == 0) throw ParseError(lineno, "matrix dimension must be positive");

  PackedSymMatrix a(rows);
  std::vector<bool> seen(a.data().size(), false);
  for (std::size_t e = 0; e < nnz; ++e) {
    if (!next_data_line(in, line, lineno))
      throw ParseError(lineno, "expected " + std::to_string(nnz) +
                                   " entries, found " + std::to_string(e));
    t = tokens(line);
    if (t.size() != 3) throw ParseError(lineno, "entry line needs 'row col value'");
    const std::size_t i = parse_count(t[0], lineno);
    const std::size_t j = parse_count(t[1], lineno);
    if (i < 1 || j < 1 || i > rows || j > rows)
      throw ParseError(lineno, "index out of range");
    const std::size_t off = packed_index(i - 1, j - 1, rows);
    if (seen[off]) throw ParseError(lineno, "duplicate entry");
    seen[off] = true;
    a.data()[off] = parse_real(t[2], lineno);
  }
  if (next_data_line(in, line, lineno)) throw ParseError(lineno, "unexpected trailing data");
  return a;
}

void write_matrix_market(std::ostream& out, const PackedSymMatrix& a) {
  const std::size_t n = a.size();
  std::size_t nnz = 0;
  for (double v : a.data()) nnz += (v != 0.0);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << n << ' ' << n << ' ' << nnz << '\n';
  // Lower triangle, column by column, as the format prescribes.
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i) {
      const double v = a.upper(j, i);
      if (v != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << fmt_real(v) << '\n';
    }
}

DenseVector read_vector(std::istream& in) {
  std::size_t lineno = 0;
  std::string line;
  DenseVector v;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (first && line.rfind("%%", 0) == 0) {
      const auto head = tokens(lower(line));
      if (head.size() != 5 || head[0] != "%%matrixmarket" ||
          head[1] != "matrix" || head[2] != "array" || head[3] != "real" ||
          head[4] != "general") {
        throw ParseError(lineno,
                         "bad header, expected '%%MatrixMarket matrix array "
                         "real general'");
      }
      return read_mm_array(in, lineno);
    }
    first = false;
    if (!line.empty() && line[0] == '%') continue;
    for (const auto& tok : tokens(line)) v.push_back(parse_real(tok, lineno));
  }
  if (v.empty()) throw ParseError(std::max<std::size_t>(lineno, 1), "no values found");
  return v;
}

void write_vector(std::ostream& out, const DenseVector& v) {
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (double x : v) out << fmt_real(x) << '\n';
}

PackedSymMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_matrix_market(in);
}

DenseVector read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_vector(in);
}

}  // namespace rotrook
