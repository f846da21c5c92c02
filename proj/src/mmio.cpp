#include "mtsylv/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>
#include <vector>

#include "mtsylv/error.hpp"

namespace mtsylv {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

class Tokens {
 public:
  Tokens(const std::string& line, long lineno) : in_(line), lineno_(lineno) {}

  long integer(const char* what) {
    std::string tok;
    if (!(in_ >> tok)) throw ParseError(lineno_, std::string("missing ") + what);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(lineno_, std::string("bad ") + what + " '" + tok + "'");
    }
    return v;
  }

  double real() {
    std::string tok;
    if (!(in_ >> tok)) throw ParseError(lineno_, "missing value");
    double v = 0.0;
    const char* first = tok.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(lineno_, "bad value '" + tok + "'");
    }
    return v;
  }

  void finish() {
    std::string extra;
    if (in_ >> extra) throw ParseError(lineno_, "unexpected token '" + extra + "'");
  }

 private:
  std::istringstream in_;
  long lineno_;
};

}  // namespace

Coefficient matrix_market_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");

  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++lineno;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix") {
    throw ParseError(lineno, "missing '%%MatrixMarket matrix' banner");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "coordinate" && format != "array") {
    throw ParseError(lineno, "unsupported format '" + format + "'");
  }
  if (field != "real" && field != "integer") {
    throw ParseError(lineno, "unsupported field '" + field + "' (only real data)");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError(lineno, "unsupported symmetry '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  const bool coordinate = format == "coordinate";

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      if (out.empty() || out[0] == '%' || blank(out)) continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw ParseError(lineno + 1, "missing size line");
  Tokens size(line, lineno);
  const long rows = size.integer("row count");
  const long cols = size.integer("column count");
  const long count = coordinate ? size.integer("entry count") : rows * cols;
  size.finish();
  if (rows < 0 || cols < 0 || count < 0) throw ParseError(lineno, "negative size");
  if (symmetric && rows != cols) {
    throw ParseError(lineno, "symmetric matrix must be square");
  }

  if (coordinate) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(count) * (symmetric ? 2 : 1));
    for (long e = 0; e < count; ++e) {
      if (!next_data_line(line)) {
        throw ParseError(lineno + 1, "expected " + std::to_string(count) +
                                         " entries, found " + std::to_string(e));
      }
      Tokens t(line, lineno);
      const long i = t.integer("row index");
      const long j = t.integer("column index");
      const double v = t.real();
      t.finish();
      if (i < 1 || i > rows || j < 1 || j > cols) {
        throw ParseError(lineno, "index (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ") out of bounds");
      }
      if (symmetric && j > i) {
        throw ParseError(lineno, "symmetric storage expects the lower triangle");
      }
      entries.emplace_back(i - 1, j - 1, v);
      if (symmetric && i != j) entries.emplace_back(j - 1, i - 1, v);
    }
    SparseMatrix S(rows, cols);
    S.setFromTriplets(entries.begin(), entries.end());
    return Coefficient(std::move(S));
  }

  Matrix M = Matrix::Zero(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = symmetric ? j : 0; i < rows; ++i) {
      if (!next_data_line(line)) throw ParseError(lineno + 1, "too few array entries");
      Tokens t(line, lineno);
      const double v = t.real();
      t.finish();
      M(i, j) = v;
      if (symmetric) M(j, i) = v;
    }
  }
  return Coefficient(std::move(M));
}

void matrix_market_write(const std::string& path, const Coefficient& M) {
  const SparseMatrix S = M.sparse();
  std::vector<std::tuple<Index, Index, double>> nz;
  for (Index j = 0; j < S.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(S, j); it; ++it) {
      if (it.value() != 0.0) nz.emplace_back(it.row(), it.col(), it.value());
    }
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%ld %ld %zu\n", static_cast<long>(S.rows()),
               static_cast<long>(S.cols()), nz.size());
  for (const auto& [i, j, v] : nz) {
    std::fprintf(f, "%ld %ld %.17g\n", static_cast<long>(i + 1),
                 static_cast<long>(j + 1), v);
  }
  const bool failed = std::ferror(f) != 0;
  if (std::fclose(f) != 0 || failed) {
    throw Error(ErrorKind::Io, "error while writing '" + path + "'");
  }
}

}  // namespace mtsylv
