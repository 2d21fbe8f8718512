#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nullsketch/kernels.hpp"
#include "nullsketch/matrix.hpp"

namespace nullsketch {

// Spectral-window constant: max |sigma - 1/sigma| over sigma in [0.4, 1.6],
// attained at 0.4. Numerator of the a priori bounds: 2.1 * 1.6.
inline constexpr double kCorollaryConstant = 2.1;
inline constexpr double kAprioriNumerator = 3.36;

// Relative gap: |a - b| / sqrt(ab) for a, b >= 0, with the conventions
// 0/0 = 0 and x/0 = infinity. Symmetric and scale invariant.
double chi(double a, double b);

// Gap hypothesis (alpha, alpha + delta) separating two spectra.
struct GapParams {
  double alpha = 0.0;
  double delta = 0.0;
};

// || R - R^{-*} || / chi(alpha^2, (alpha + delta)^2) where R is the thin QR
// factor of X^* U, X being the m x s perturbing matrix and U an orthonormal
// m x n factor. Deterministic once the gap hypothesis holds. Intended for
// explicit test-scale operators: m is capped at 4096.
double theorem_bound_R(const Matrix& X, const Matrix& U, const GapParams& params,
                       MatrixNorm norm);

// 2.1 / chi(alpha^2, (alpha + delta)^2): the spectral-norm bound once the
// perturbing factor has its singular values in [0.4, 1.6].
double corollary_bound(const GapParams& params);

enum class SameDimBranch { b1, b2 };
enum class DiffDimBranch { b3, b4 };

// A priori bounds from the two spectra alone. sigma_gap = sigma_{n-k}. For
// the same-dimension bounds sigma_tail = sigma_{n-k+1}; for the
// different-dimension ones sigma_tail = sigma_{n-l+1}. Empty when the
// branch's gap condition fails:
//   b1: sigma_gap > 1.6 sigma_tail   ->  3.36 g t / (g^2 - 2.56 t^2)
//   b2: 0.4 sigma_gap > sigma_tail   ->  3.36 g t / (0.16 g^2 - t^2)
//   b3: 0.4 sigma_gap > sigma_tail   ->  3.36 g t / (0.16 g^2 - t^2)
//   b4: sigma_gap > 1.6 sigma_tail   ->  3.36 g t / (g^2 - 2.56 t^2)
std::optional<double> apriori_bound_same_dim(double sigma_gap, double sigma_tail,
                                             SameDimBranch branch);
std::optional<double> apriori_bound_diff_dim(double sigma_gap, double sigma_tail,
                                             DiffDimBranch branch);

// One subspace pairing with the gap parameters read off the two spectra.
// delta <= 0 marks the branch inadmissible; its bound values are meaningless.
struct AngleBranch {
  std::string pairing;   // which subspaces the angles compare
  RealVector angles;     // canonical angles, ascending
  GapParams params;
  bool admissible = false;
};

struct AngleReport {
  std::vector<AngleBranch> branches;
};

// Measure canonical angles between trailing subspaces of A and Atil and
// extract the (alpha, alpha + delta) candidates for each hypothesis branch.
// Without l: compares the two trailing-k subspaces (two branches, shared
// angles). With l < k: compares trailing-l of A against trailing-k of Atil
// and trailing-k of A against trailing-l of Atil, one branch each.
AngleReport measure_angles(const Matrix& a, const Matrix& atil, Index k,
                           std::optional<Index> l = std::nullopt);

}  // namespace nullsketch
