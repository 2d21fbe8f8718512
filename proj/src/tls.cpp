#include "nullsketch/tls.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

namespace nullsketch {

namespace {

void validate_problem(const TlsProblem& p) {
  const Index m = p.A.rows();
  const Index n = p.A.cols();
  const Index k = p.B.cols();
  if (p.B.rows() != m) throw std::invalid_argument("tls: A and B row counts differ");
  if (k < 1) throw std::invalid_argument("tls: B must have at least one column");
  if (n < k) throw std::invalid_argument("tls: need n >= k");
  if (m < n + k) throw std::invalid_argument("tls: need m >= n + k");
}

// X = -V_k1 V_k2^{-1} plus a condition estimate for the k x k corner V_k2.
// The corner is tiny, so a Jacobi SVD gives the estimate essentially for free.
std::pair<Matrix, double> extract_x(const Matrix& vk, Index n, Index k,
                                    double cond_limit) {
  auto solve = [&](const auto& v) -> std::pair<Matrix, double> {
    using Mat = std::decay_t<decltype(v)>;
    Mat v1 = v.topRows(n);
    Mat v2 = v.bottomRows(k);
    Eigen::JacobiSVD<Mat> corner(v2);
    const double smax = corner.singularValues()(0);
    const double smin = corner.singularValues()(k - 1);
    const double cond =
        smin == 0.0 ? std::numeric_limits<double>::infinity() : smax / smin;
    if (!(cond <= cond_limit)) throw TlsConditionError(cond);
    // X^T solves V_k2^T X^T = -V_k1^T; plain transpose works over C as well.
    Mat xt = v2.transpose().partialPivLu().solve(Mat(-v1.transpose()));
    return {Matrix(Mat(xt.transpose())), cond};
  };
  return vk.visit(solve);
}

TlsSolution assemble(const Matrix& aug_for_certificate, const SvdFactorization& f,
                     double sigma_n_a, Index n, Index k, const TlsOptions& options) {
  const double sigma_trailing = f.S(n);
  if (!(sigma_n_a > sigma_trailing) && !options.allow_marginal) {
    throw TlsExistenceError(sigma_n_a, sigma_trailing);
  }
  SubspaceBasis vk = SubspaceBasis::unchecked(col_block(f.V, n, k));
  auto [x, cond] = extract_x(vk.matrix(), n, k, options.cond_limit);
  TlsSolution sol{std::move(x), std::move(vk),
                  std::sqrt(f.S.tail(k).squaredNorm()), cond, f.S, std::nullopt};
  if (options.certificate) {
    sol.residual_certificate =
        frobenius_norm(matmul(aug_for_certificate, sol.Vk.matrix()));
  }
  return sol;
}

}  // namespace

TlsExistenceError::TlsExistenceError(double sigma_n_a, double sigma_trailing)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "tls: solution existence check failed: sigma_n(A) = " << sigma_n_a
            << " is not above sigma_{n+1}([A|B]) = " << sigma_trailing;
        return msg.str();
      }()),
      sigma_n_a_(sigma_n_a),
      sigma_trailing_(sigma_trailing) {}

TlsConditionError::TlsConditionError(double cond)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "tls: V_k2 is ill conditioned (cond estimate " << cond
            << "); X = -V_k1 V_k2^{-1} is unreliable";
        return msg.str();
      }()),
      cond_(cond) {}

TlsSolution tls_solve_exact(const TlsProblem& p, const TlsOptions& options) {
  validate_problem(p);
  const Index n = p.A.cols();
  const Index k = p.B.cols();
  Matrix aug = hcat(p.A, p.B);
  // One tall QR up front; everything else happens on the (n+k) x (n+k)
  // triangle. Its leading n columns share singular values with A, so the
  // solvability check costs one extra small SVD instead of a pass over A.
  QrFactorization qr = thin_qr(aug);
  SvdFactorization f = svd(qr.R);
  RealVector sig_a = singular_values(col_block(qr.R, 0, n));
  return assemble(aug, f, sig_a(n - 1), n, k, options);
}

TlsSolution tls_solve_sketched(const TlsProblem& p, const SketchOperator& S,
                               const TlsOptions& options) {
  validate_problem(p);
  const Index n = p.A.cols();
  const Index k = p.B.cols();
  if (S.m_effective() != p.A.rows()) {
    throw std::invalid_argument("tls: sketch operator row count does not match [A|B]");
  }
  if (S.s() < n + k) {
    throw std::invalid_argument("tls: sketch size below n + k");
  }
  Matrix aug = hcat(p.A, p.B);
  SketchedMatrix sk = apply(S, aug);
  SvdFactorization f = svd(sk.data);
  RealVector sig_a = singular_values(col_block(sk.data, 0, n));
  return assemble(aug, f, sig_a(n - 1), n, k, options);
}

TlsErrorMetrics tls_error_metrics(const TlsSolution& exact, const TlsSolution& sk) {
  if (exact.X.rows() != sk.X.rows() || exact.X.cols() != sk.X.cols()) {
    throw std::invalid_argument("tls_error_metrics: X shapes differ");
  }
  const double x_norm = singular_values(exact.X)(0);
  if (x_norm == 0.0) {
    throw std::invalid_argument("tls_error_metrics: exact X is zero; rel_err undefined");
  }
  TlsErrorMetrics metrics;
  ComplexMatrix d = exact.X.to_complex() - sk.X.to_complex();
  metrics.rel_err = singular_values(Matrix(d))(0) / x_norm;
  SubspaceBasis span_exact(thin_qr(exact.X).Q);
  SubspaceBasis span_sk(thin_qr(sk.X).Q);
  metrics.sin_X = sin_theta_norm(span_exact, span_sk, MatrixNorm::spectral);
  metrics.sin_Vk = sin_theta_norm(exact.Vk, sk.Vk, MatrixNorm::spectral);
  return metrics;
}

}  // namespace nullsketch
