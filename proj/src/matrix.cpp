#include "nullsketch/matrix.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace nullsketch {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions disagree (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + ")");
  if (a.is_real() && b.is_real()) return Matrix(RealMatrix(a.real() * b.real()));
  return Matrix(ComplexMatrix(a.to_complex() * b.to_complex()));
}

Matrix adjoint(const Matrix& a) {
  if (a.is_real()) return Matrix(RealMatrix(a.real().transpose()));
  return Matrix(ComplexMatrix(a.cplx().adjoint()));
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("hcat: row counts disagree");
  if (a.is_real() && b.is_real()) {
    RealMatrix r(a.rows(), a.cols() + b.cols());
    r << a.real(), b.real();
    return Matrix(std::move(r));
  }
  ComplexMatrix r(a.rows(), a.cols() + b.cols());
  r << a.to_complex(), b.to_complex();
  return Matrix(std::move(r));
}

Matrix col_block(const Matrix& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols())
    throw std::invalid_argument("col_block: range out of bounds");
  if (a.is_real()) return Matrix(RealMatrix(a.real().middleCols(start, count)));
  return Matrix(ComplexMatrix(a.cplx().middleCols(start, count)));
}

double frobenius_norm(const Matrix& a) {
  return a.visit([](const auto& m) { return m.norm(); });
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shapes disagree");
  if (a.is_real() && b.is_real())
    return (a.real() - b.real()).cwiseAbs().maxCoeff();
  ComplexMatrix d = a.to_complex() - b.to_complex();
  if (d.size() == 0) return 0.0;
  return d.cwiseAbs().maxCoeff();
}

namespace {

[[noreturn]] void io_fail(const std::string& path, long line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

bool parse_double(const std::string& tok, double& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (b != e && *b == '+') ++b;  // from_chars rejects an explicit plus
  if (b == e) return false;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

// Accepts "a", "bi", "a+bi", "a-bi" (exponents allowed in both parts).
bool parse_complex_token(std::string tok, Complex& out) {
  // strip whitespace
  std::string t;
  for (char c : tok)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) return false;
  if (t.back() != 'i' && t.back() != 'I') {
    double re;
    if (!parse_double(t, re)) return false;
    out = Complex(re, 0.0);
    return true;
  }
  t.pop_back();  // drop the trailing i
  // split at the last +/- that is not a leading sign and not part of an exponent
  std::size_t split = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    char c = t[i];
    if ((c == '+' || c == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  double re = 0.0, im;
  std::string imtok;
  if (split == std::string::npos) {
    imtok = t;
  } else {
    if (!parse_double(t.substr(0, split), re)) return false;
    imtok = t.substr(split);
  }
  if (imtok.empty() || imtok == "+") {
    im = 1.0;
  } else if (imtok == "-") {
    im = -1.0;
  } else if (!parse_double(imtok, im)) {
    return false;
  }
  out = Complex(re, im);
  return true;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(Complex v) {
  std::string s = format_double(v.real());
  s += (v.imag() < 0.0 || std::signbit(v.imag())) ? "" : "+";
  s += format_double(v.imag());
  s += "i";
  return s;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

}  // namespace

Matrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) io_fail(path, 1, "empty file");
  ++lineno;
  bool complex_field;
  {
    std::vector<std::string> h = split_tokens(line);
    if (h.size() < 4 || h[0] != "%%MatrixMarket" || h[1] != "matrix")
      io_fail(path, lineno, "expected MatrixMarket banner");
    if (h[2] != "array")
      io_fail(path, lineno, "only dense 'array' format is supported, got '" + h[2] + "'");
    if (h[3] != "real" && h[3] != "complex")
      io_fail(path, lineno, "unsupported field '" + h[3] + "'");
    if (h.size() >= 5 && h[4] != "general")
      io_fail(path, lineno, "only 'general' symmetry is supported, got '" + h[4] + "'");
    complex_field = (h[3] == "complex");
  }

  // size line (comments may precede it)
  Index rows = 0, cols = 0;
  for (;;) {
    if (!std::getline(in, line)) io_fail(path, lineno + 1, "missing size line");
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (split_tokens(line).empty()) continue;
    std::vector<std::string> t = split_tokens(line);
    double r, c;
    if (t.size() != 2 || !parse_double(t[0], r) || !parse_double(t[1], c) ||
        r < 0 || c < 0 || r != std::floor(r) || c != std::floor(c))
      io_fail(path, lineno, "expected size line 'rows cols'");
    rows = static_cast<Index>(r);
    cols = static_cast<Index>(c);
    break;
  }

  const Index total = rows * cols;
  RealMatrix re;
  ComplexMatrix cx;
  if (complex_field)
    cx.resize(rows, cols);
  else
    re.resize(rows, cols);

  Index got = 0;
  while (got < total) {
    if (!std::getline(in, line))
      io_fail(path, lineno + 1,
              "unexpected end of file, expected " + std::to_string(total) +
                  " entries, got " + std::to_string(got));
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::vector<std::string> t = split_tokens(line);
    if (t.empty()) continue;
    // column-major order, one entry per line
    Index i = got % rows, j = got / rows;
    if (complex_field) {
      double a, b;
      if (t.size() != 2 || !parse_double(t[0], a) || !parse_double(t[1], b))
        io_fail(path, lineno, "expected 2 real tokens for a complex entry");
      cx(i, j) = Complex(a, b);
    } else {
      double a;
      if (t.size() != 1 || !parse_double(t[0], a))
        io_fail(path, lineno, "expected 1 real token");
      re(i, j) = a;
    }
    ++got;
  }

  if (complex_field) return Matrix(std::move(cx));
  return Matrix(std::move(re));
}

void save_matrix_market(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const bool cplx = !a.is_real();
  out << "%%MatrixMarket matrix array " << (cplx ? "complex" : "real")
      << " general\n";
  out << a.rows() << " " << a.cols() << "\n";
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (cplx) {
        Complex v = a.cplx()(i, j);
        out << format_double(v.real()) << " " << format_double(v.imag()) << "\n";
      } else {
        out << format_double(a.real()(i, j)) << "\n";
      }
    }
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Matrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::vector<std::vector<Complex>> entries;
  bool any_imag = false;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // a trailing blank line is tolerated; blank lines elsewhere are not
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (blank) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      io_fail(path, lineno, "blank line inside matrix");
    }
    std::vector<Complex> row;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      std::string tok = line.substr(start, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - start);
      Complex v;
      if (!parse_complex_token(tok, v))
        io_fail(path, lineno, "cannot parse entry '" + tok + "'");
      if (v.imag() != 0.0) any_imag = true;
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!entries.empty() && row.size() != entries.front().size())
      io_fail(path, lineno,
              "row has " + std::to_string(row.size()) + " entries, expected " +
                  std::to_string(entries.front().size()));
    entries.push_back(std::move(row));
  }
  const Index rows = static_cast<Index>(entries.size());
  const Index cols = rows == 0 ? 0 : static_cast<Index>(entries.front().size());
  if (any_imag) {
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = entries[i][j];
    return Matrix(std::move(m));
  }
  RealMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = entries[i][j].real();
  return Matrix(std::move(m));
}

void save_csv(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const bool cplx = !a.is_real();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out << ",";
      if (cplx)
        out << format_complex(a.cplx()(i, j));
      else
        out << format_double(a.real()(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace nullsketch
