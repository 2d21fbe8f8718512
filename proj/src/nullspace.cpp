#include "nullsketch/nullspace.hpp"

#include <stdexcept>
#include <string>

namespace nullsketch {

namespace {

NullspaceResult from_sketch_svd(const Matrix& sa, Index k) {
  const Index n = sa.cols();
  if (k < 0 || k >= n) {
    throw std::invalid_argument("nullspace: k must satisfy 0 <= k < n, got k = " +
                                std::to_string(k) + ", n = " + std::to_string(n));
  }
  SvdFactorization f = svd(sa);
  NullspaceResult res{SubspaceBasis(col_block(f.V, n - k, k)), f.S, std::nullopt, k};
  return res;
}

}  // namespace

NullspaceResult solve_k(const Matrix& A, Index k, const SketchOperator& S) {
  if (A.rows() != S.m_effective()) {
    throw std::invalid_argument("nullspace: matrix rows do not match the sketch operator");
  }
  if (S.s() < A.cols()) {
    throw std::invalid_argument("nullspace: sketch size s = " + std::to_string(S.s()) +
                                " is smaller than n = " + std::to_string(A.cols()));
  }
  return from_sketch_svd(apply(S, A).data, k);
}

NullspaceResult solve_tol(const Matrix& A, double eps, const SketchOperator& S) {
  if (!(eps >= 0.0)) throw std::invalid_argument("nullspace: eps must be non-negative");
  if (A.rows() != S.m_effective()) {
    throw std::invalid_argument("nullspace: matrix rows do not match the sketch operator");
  }
  if (S.s() < A.cols()) {
    throw std::invalid_argument("nullspace: sketch size s = " + std::to_string(S.s()) +
                                " is smaller than n = " + std::to_string(A.cols()));
  }
  Matrix sa = apply(S, A).data;
  SvdFactorization f = svd(sa);
  const Index n = sa.cols();
  Index k = 0;
  while (k < n && f.S(n - 1 - k) < eps) ++k;
  if (k == n) {
    throw std::invalid_argument("nullspace: eps selects every singular value; the trailing "
                                "subspace would be the whole space");
  }
  return {SubspaceBasis(col_block(f.V, n - k, k)), f.S, std::nullopt, k};
}

double residual_certificate(const Matrix& A, const SubspaceBasis& W) {
  if (A.cols() != W.ambient_dim()) {
    throw std::invalid_argument("residual_certificate: basis lives in dimension " +
                                std::to_string(W.ambient_dim()) + ", matrix has " +
                                std::to_string(A.cols()) + " columns");
  }
  return frobenius_norm(matmul(A, W.matrix()));
}

double residual_suboptimality_bound(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("residual_suboptimality_bound: delta must lie in (0, 1)");
  }
  return (1.0 + delta) / (1.0 - delta);
}

}  // namespace nullsketch
