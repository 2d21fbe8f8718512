#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace nullsketch {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

enum class ScalarKind { real, complex };

/// Default relative tolerance for factorization residuals and orthonormality
/// checks, in units of the input's scale.
inline constexpr double kFtol = 1e-12;

/// Dense column-major matrix holding either real or complex entries.
///
/// The scalar kind is decided when the matrix is created and never changes
/// behind the caller's back: real data flows through real arithmetic, and
/// promotion to complex happens only when an operation genuinely mixes kinds
/// (or a complex-valued transform is applied).
class Matrix {
 public:
  Matrix() : data_(RealMatrix(0, 0)) {}
  Matrix(RealMatrix&& m) : data_(std::move(m)) {}
  Matrix(ComplexMatrix&& m) : data_(std::move(m)) {}

  /// Accepts any dense Eigen expression with double or complex<double> scalar.
  template <typename Derived>
  Matrix(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    if constexpr (std::is_same_v<Scalar, double>) {
      data_ = RealMatrix(m);
    } else {
      static_assert(std::is_same_v<Scalar, Complex>,
                    "Matrix supports double and complex<double> scalars only");
      data_ = ComplexMatrix(m);
    }
  }

  static Matrix zeros(Index rows, Index cols, ScalarKind kind) {
    if (kind == ScalarKind::real) return Matrix(RealMatrix(RealMatrix::Zero(rows, cols)));
    return Matrix(ComplexMatrix(ComplexMatrix::Zero(rows, cols)));
  }

  ScalarKind kind() const {
    return std::holds_alternative<RealMatrix>(data_) ? ScalarKind::real
                                                     : ScalarKind::complex;
  }
  bool is_real() const { return kind() == ScalarKind::real; }

  Index rows() const {
    return std::visit([](const auto& m) { return m.rows(); }, data_);
  }
  Index cols() const {
    return std::visit([](const auto& m) { return m.cols(); }, data_);
  }

  /// Underlying storage; throws if the matrix holds the other scalar kind.
  const RealMatrix& real() const {
    if (!is_real()) throw std::logic_error("Matrix: real() called on complex matrix");
    return std::get<RealMatrix>(data_);
  }
  const ComplexMatrix& cplx() const {
    if (is_real()) throw std::logic_error("Matrix: cplx() called on real matrix");
    return std::get<ComplexMatrix>(data_);
  }
  RealMatrix& real() {
    if (!is_real()) throw std::logic_error("Matrix: real() called on complex matrix");
    return std::get<RealMatrix>(data_);
  }
  ComplexMatrix& cplx() {
    if (is_real()) throw std::logic_error("Matrix: cplx() called on real matrix");
    return std::get<ComplexMatrix>(data_);
  }

  /// Copy promoted to complex storage regardless of kind.
  ComplexMatrix to_complex() const {
    if (is_real()) return std::get<RealMatrix>(data_).cast<Complex>();
    return std::get<ComplexMatrix>(data_);
  }

  Complex operator()(Index i, Index j) const {
    if (is_real()) return Complex(std::get<RealMatrix>(data_)(i, j), 0.0);
    return std::get<ComplexMatrix>(data_)(i, j);
  }

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), data_);
  }

 private:
  std::variant<RealMatrix, ComplexMatrix> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix adjoint(const Matrix& a);
Matrix hcat(const Matrix& a, const Matrix& b);
/// Columns [start, start+count) as a new matrix of the same kind.
Matrix col_block(const Matrix& a, Index start, Index count);
double frobenius_norm(const Matrix& a);
/// max_ij |a_ij - b_ij|; matrices must have equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// MatrixMarket dense ("array") format, real or complex, column-major.
/// Malformed input raises std::runtime_error naming the 1-based line.
Matrix load_matrix_market(const std::string& path);
void save_matrix_market(const std::string& path, const Matrix& a);

/// Headerless CSV, one row per line. Complex entries use "a+bi"; a file is
/// read as complex if any entry carries an imaginary part.
Matrix load_csv(const std::string& path);
void save_csv(const std::string& path, const Matrix& a);

}  // namespace nullsketch
