#include "nullsketch/kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

#include "nullsketch/rng.hpp"

namespace nullsketch {

namespace {

template <typename Mat>
void svd_impl(const Mat& a, Mat& u, RealVector& s, Mat& v) {
  Eigen::BDCSVD<Mat> backend(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (backend.info() != Eigen::Success)
    throw SvdConvergenceError("svd: backend failed to converge");
  u = backend.matrixU();
  s = backend.singularValues();
  v = backend.matrixV();
}

template <typename Mat>
RealVector singular_values_impl(const Mat& a) {
  Eigen::BDCSVD<Mat> backend(a);
  if (backend.info() != Eigen::Success)
    throw SvdConvergenceError("svd: backend failed to converge");
  return backend.singularValues();
}

template <typename Mat>
void thin_qr_impl(const Mat& a, Mat& q, Mat& r) {
  const Index m = a.rows(), n = a.cols();
  Eigen::HouseholderQR<Mat> backend(a);
  Mat thin = Mat::Identity(m, n);
  q = backend.householderQ() * thin;
  r = backend.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
  // rotate each diagonal entry of R onto the non-negative real axis
  for (Index j = 0; j < n; ++j) {
    auto d = r(j, j);
    double mag = std::abs(d);
    if (mag == 0.0) continue;
    auto phase = d / mag;
    if (phase == decltype(phase)(1)) continue;
    r.row(j) *= decltype(phase)(1) / phase;
    r(j, j) = mag;  // exact by construction
    q.col(j) *= phase;
  }
}

}  // namespace

SvdFactorization svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0)
    throw std::invalid_argument("svd: matrix is empty");
  SvdFactorization f;
  if (a.is_real()) {
    RealMatrix u, v;
    svd_impl(a.real(), u, f.S, v);
    f.U = Matrix(std::move(u));
    f.V = Matrix(std::move(v));
  } else {
    ComplexMatrix u, v;
    svd_impl(a.cplx(), u, f.S, v);
    f.U = Matrix(std::move(u));
    f.V = Matrix(std::move(v));
  }
  return f;
}

RealVector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0)
    throw std::invalid_argument("singular_values: matrix is empty");
  if (a.is_real()) return singular_values_impl(a.real());
  return singular_values_impl(a.cplx());
}

QrFactorization thin_qr(const Matrix& a) {
  if (a.rows() < a.cols())
    throw std::invalid_argument("thin_qr: need rows >= cols");
  QrFactorization f;
  if (a.is_real()) {
    RealMatrix q, r;
    thin_qr_impl(a.real(), q, r);
    f.Q = Matrix(std::move(q));
    f.R = Matrix(std::move(r));
  } else {
    ComplexMatrix q, r;
    thin_qr_impl(a.cplx(), q, r);
    f.Q = Matrix(std::move(q));
    f.R = Matrix(std::move(r));
  }
  return f;
}

SubspaceBasis::SubspaceBasis(Matrix basis) : basis_(std::move(basis)) {
  const Index k = basis_.cols();
  if (k > basis_.rows())
    throw std::invalid_argument("SubspaceBasis: more columns than ambient dimension");
  if (k == 0) return;
  Matrix gram = matmul(adjoint(basis_), basis_);
  double err = gram.visit([k](const auto& g) {
    using Mat = std::decay_t<decltype(g)>;
    return (g - Mat::Identity(k, k)).cwiseAbs().maxCoeff();
  });
  if (err > 1e-10 * static_cast<double>(k))
    throw std::invalid_argument("SubspaceBasis: columns are not orthonormal (defect " +
                                std::to_string(err) + ")");
}

SubspaceBasis SubspaceBasis::unchecked(Matrix basis) {
  return SubspaceBasis(std::move(basis), unchecked_t{});
}

namespace {

// Singular values of Vb - Ub (Ub^* Vb): the sines of the canonical angles
// when Vb has no more columns than Ub. Swapping the arguments is allowed
// (the angle set is symmetric), so callers order them first.
RealVector complement_sines(const Matrix& big, const Matrix& small) {
  Matrix cross = matmul(adjoint(big), small);
  Matrix proj = matmul(big, cross);
  Matrix resid = small.is_real() && proj.is_real()
                     ? Matrix(RealMatrix(small.real() - proj.real()))
                     : Matrix(ComplexMatrix(small.to_complex() - proj.to_complex()));
  return singular_values(resid);
}

}  // namespace

RealVector canonical_angles(const SubspaceBasis& ub, const SubspaceBasis& vb) {
  if (ub.ambient_dim() != vb.ambient_dim())
    throw std::invalid_argument("canonical_angles: ambient dimensions disagree");
  const bool u_big = ub.subspace_dim() >= vb.subspace_dim();
  const Matrix& big = u_big ? ub.matrix() : vb.matrix();
  const Matrix& small = u_big ? vb.matrix() : ub.matrix();
  const Index k = small.cols();
  if (k == 0) return RealVector(0);

  RealVector cosines = singular_values(matmul(adjoint(big), small));  // descending
  RealVector sines = complement_sines(big, small);                    // descending
  RealVector angles(k);
  for (Index i = 0; i < k; ++i) {
    double c = std::min(1.0, std::max(0.0, cosines(i)));
    double s = std::min(1.0, std::max(0.0, sines(k - 1 - i)));
    // i-th smallest angle: cosine path near pi/2, sine path near 0
    angles(i) = (c >= M_SQRT1_2) ? std::asin(s) : std::acos(c);
  }
  return angles;
}

double sin_theta_norm(const SubspaceBasis& ub, const SubspaceBasis& vb,
                      MatrixNorm norm) {
  if (ub.ambient_dim() != vb.ambient_dim())
    throw std::invalid_argument("sin_theta_norm: ambient dimensions disagree");
  if (ub.subspace_dim() == 0 || vb.subspace_dim() == 0) return 0.0;
  const bool u_big = ub.subspace_dim() >= vb.subspace_dim();
  const Matrix& big = u_big ? ub.matrix() : vb.matrix();
  const Matrix& small = u_big ? vb.matrix() : ub.matrix();
  RealVector sines = complement_sines(big, small);
  if (norm == MatrixNorm::spectral) return std::min(1.0, sines(0));
  double sq = 0.0;
  for (Index i = 0; i < sines.size(); ++i)
    sq += std::min(1.0, sines(i)) * std::min(1.0, sines(i));
  return std::sqrt(sq);
}

Matrix make_test_matrix(Index m, Index n, const RealVector& spectrum,
                        LeftFactorMode left_mode, RightFactorMode /*right_mode*/,
                        std::uint64_t seed) {
  if (m < n) throw std::invalid_argument("make_test_matrix: need m >= n");
  if (spectrum.size() != n)
    throw std::invalid_argument("make_test_matrix: spectrum length must equal n");
  for (Index i = 0; i < n; ++i) {
    if (spectrum(i) < 0.0)
      throw std::invalid_argument("make_test_matrix: spectrum must be non-negative");
    if (i > 0 && spectrum(i) > spectrum(i - 1))
      throw std::invalid_argument("make_test_matrix: spectrum must be non-increasing");
  }

  RealMatrix u;
  if (left_mode == LeftFactorMode::coherent) {
    u = RealMatrix::Zero(m, n);
    u.topRows(n) = RealMatrix::Identity(n, n);
  } else {
    PhiloxStream rng(seed, 1);
    RealMatrix g(m, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) g(i, j) = rng.next_gaussian();
    QrFactorization f = thin_qr(Matrix(std::move(g)));
    u = f.Q.real();
  }

  PhiloxStream rng(seed, 2);
  RealMatrix gv(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) gv(i, j) = rng.next_gaussian();
  RealMatrix v = thin_qr(Matrix(std::move(gv))).Q.real();

  RealMatrix a = (u * spectrum.asDiagonal()) * v.transpose();
  return Matrix(std::move(a));
}

}  // namespace nullsketch
