#include "nnorth/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace nnorth {

namespace {

struct Token {
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::istream& in) {
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < data.size()) {
    while (i < data.size() && std::isspace(static_cast<unsigned char>(data[i]))) ++i;
    if (i >= data.size()) break;
    const std::size_t start = i;
    while (i < data.size() && !std::isspace(static_cast<unsigned char>(data[i]))) ++i;
    out.push_back({data.substr(start, i - start), start});
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t offset, const std::string& msg) {
  std::ostringstream os;
  os << "parse error at byte " << offset << ": " << msg;
  throw InputError(os.str());
}

double to_number(const Token& t) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t.text, &used);
  } catch (const std::exception&) {
    parse_fail(t.offset, "malformed number '" + t.text + "'");
  }
  if (used != t.text.size() || !std::isfinite(v)) {
    parse_fail(t.offset, "malformed number '" + t.text + "'");
  }
  return v;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

std::string stem_of(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

QapInstance parse_qaplib(std::istream& in, std::string name) {
  const auto tokens = tokenize(in);
  if (tokens.empty()) parse_fail(0, "empty input, expected dimension n");
  const double nd = to_number(tokens[0]);
  if (nd < 1 || nd != std::floor(nd) || nd > 1e5) {
    parse_fail(tokens[0].offset, "dimension must be a positive integer");
  }
  const auto n = static_cast<Index>(nd);
  const std::size_t expected = 2 * static_cast<std::size_t>(n * n);
  const std::size_t found = tokens.size() - 1;
  if (found != expected) {
    const std::size_t off = found < expected
                                ? tokens.back().offset + tokens.back().text.size()
                                : tokens[expected + 1].offset;
    std::ostringstream os;
    os << "expected 2*n^2 = " << expected << " matrix entries for n = " << n
       << ", found " << found;
    parse_fail(off, os.str());
  }
  QapInstance inst;
  inst.name = std::move(name);
  inst.n = n;
  inst.a.resize(n, n);
  inst.b.resize(n, n);
  std::size_t k = 1;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) inst.a(i, j) = to_number(tokens[k++]);
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) inst.b(i, j) = to_number(tokens[k++]);
  }
  return inst;
}

QapInstance parse_qaplib_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_qaplib(in, stem_of(path));
}

void emit_qaplib(std::ostream& os, const QapInstance& inst) {
  auto put = [&](double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
      os << static_cast<long long>(v);
    } else {
      os << format_double(v);
    }
  };
  os << inst.n << "\n\n";
  for (const Matrix* m : {&inst.a, &inst.b}) {
    for (Index i = 0; i < inst.n; ++i) {
      for (Index j = 0; j < inst.n; ++j) {
        if (j) os << ' ';
        put((*m)(i, j));
      }
      os << '\n';
    }
    os << '\n';
  }
}

std::optional<double> read_best_known(std::istream& in, const std::string& name) {
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    double value;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == name) {
      if (!(ls >> value)) throw InputError("best-known entry for '" + name + "' has no value");
      return value;
    }
  }
  return std::nullopt;
}

std::optional<double> read_best_known_file(const std::string& path,
                                           const std::string& name) {
  auto in = open_or_throw(path);
  return read_best_known(in, name);
}

Matrix read_dense_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        throw InputError("dense matrix: malformed entry '" + tok + "' on line " +
                         std::to_string(line_no));
      }
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("dense matrix: line " + std::to_string(line_no) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("dense matrix: no data");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix read_dense_matrix_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_dense_matrix(in);
}

void write_dense_matrix(std::ostream& os, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

std::vector<int> read_labels_file(const std::string& path) {
  auto in = open_or_throw(path);
  std::vector<int> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InputError("labels: malformed entry '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace nnorth
