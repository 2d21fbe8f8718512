#pragma once

#include <optional>

#include "nullsketch/kernels.hpp"
#include "nullsketch/matrix.hpp"
#include "nullsketch/sketch.hpp"

namespace nullsketch {

// Worst-case residual inflation of a sketched minimizer under an SRFT sketch
// large enough for the embedding window [0.4, 1.48]: 1.48 / 0.4.
inline constexpr double kSrftResidualFactor = 3.7;

struct NullspaceResult {
  SubspaceBasis W;                       // n x k, orthonormal
  RealVector sketched_singular_values;   // all n values of the sketch, non-increasing
  std::optional<double> residual_fro;    // ||A W||_F, filled by residual_certificate
  Index k = 0;
};

// Approximate trailing right singular subspace of A: sketch A with S, take the
// trailing k right singular vectors of the small matrix. Requires s >= n > k.
NullspaceResult solve_k(const Matrix& A, Index k, const SketchOperator& S);

// Tolerance variant: k is the number of sketched singular values below eps.
// May select k = 0 (empty basis); selecting all n is an error. Note the
// comparison is against sketched values, which track the true ones only up to
// the embedding distortion.
NullspaceResult solve_tol(const Matrix& A, double eps, const SketchOperator& S);

// ||A W||_F in one pass over A. Opt-in: costs O(mnk).
double residual_certificate(const Matrix& A, const SubspaceBasis& W);

// (1 + delta) / (1 - delta), the residual inflation factor once the sketch is
// an embedding with distortion delta in (0, 1).
double residual_suboptimality_bound(double delta);

}  // namespace nullsketch
