#pragma once

#include <cstdint>

#include "nullsketch/matrix.hpp"

namespace nullsketch {

enum class MatrixNorm { spectral, frobenius };

/// A = U * diag(S) * V^*, S non-increasing and non-negative.
struct SvdFactorization {
  Matrix U;
  RealVector S;
  Matrix V;
};

struct SvdConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thin SVD. Deterministic for fixed input; raises SvdConvergenceError rather
/// than returning NaNs when the backend fails.
SvdFactorization svd(const Matrix& a);

/// Singular values only (cheaper when factors are not needed).
RealVector singular_values(const Matrix& a);

struct QrFactorization {
  Matrix Q;
  Matrix R;
};

/// Thin QR with diag(R) real and non-negative, which pins the factorization
/// uniquely for full-rank input.
QrFactorization thin_qr(const Matrix& a);

/// Matrix with orthonormal columns spanning a subspace of C^n (or R^n).
class SubspaceBasis {
 public:
  /// Validates basis^* basis = I to a tolerance scaled by the column count.
  explicit SubspaceBasis(Matrix basis);
  /// Skips validation; for outputs of factorizations already known orthonormal.
  static SubspaceBasis unchecked(Matrix basis);

  const Matrix& matrix() const { return basis_; }
  Index ambient_dim() const { return basis_.rows(); }
  Index subspace_dim() const { return basis_.cols(); }

 private:
  struct unchecked_t {};
  SubspaceBasis(Matrix basis, unchecked_t) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// Canonical angles between the two subspaces, ascending, in [0, pi/2].
/// min(k1, k2) angles are returned. Small angles are computed through the
/// complement-projection sines, so values near 0 do not lose precision to
/// an arccos round trip.
RealVector canonical_angles(const SubspaceBasis& ub, const SubspaceBasis& vb);

/// sin of the largest canonical angle (spectral) or the root sum of squared
/// sines (frobenius).
double sin_theta_norm(const SubspaceBasis& ub, const SubspaceBasis& vb,
                      MatrixNorm norm);

enum class LeftFactorMode { haar, coherent };
enum class RightFactorMode { haar };

/// U * diag(spectrum) * V^T with U either Haar-distributed (QR of a seeded
/// Gaussian) or the coherent frame [I_n; 0], and V Haar. Real-valued. The
/// output's singular values match `spectrum` to roundoff.
Matrix make_test_matrix(Index m, Index n, const RealVector& spectrum,
                        LeftFactorMode left_mode, RightFactorMode right_mode,
                        std::uint64_t seed);

}  // namespace nullsketch
