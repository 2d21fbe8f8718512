#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "nullsketch/matrix.hpp"
#include "nullsketch/sketch.hpp"

namespace nullsketch {

// AAA rational approximation in barycentric form. The exact variant rebuilds
// and factorizes the Loewner matrix every iteration; the sketched variant
// maintains a sketch of it across iterations with one row downdate and one
// column update per step.

struct SampleSet {
  ComplexVector z;  // m pairwise distinct points
  ComplexVector f;  // f(z_i)
};

struct BarycentricRational {
  ComplexVector support_z;
  ComplexVector support_f;
  ComplexVector weights;  // unit 2-norm
};

struct AaaIterationRecord {
  Index degree = 0;         // support-point count after this iteration
  Index support_index = 0;  // sample index chosen this iteration
  double max_error = 0.0;   // true max |f - r| over active points after solving
  double sigma_min = 0.0;   // smallest singular value of the solved system
  double seconds = 0.0;
  // Relative gap between the maintained sketch and a from-scratch sketch of
  // the row-zeroed Loewner matrix; NaN unless instrumentation is on.
  double consistency_error = std::numeric_limits<double>::quiet_NaN();
};

struct AaaTrace {
  std::vector<AaaIterationRecord> iterations;
  bool converged = false;
};

// r(z) = (sum_j f_j w_j/(z - z_j)) / (sum_j w_j/(z - z_j)); at a support
// point the removable singularity is resolved by returning the stored value.
Complex eval(const BarycentricRational& r, Complex z);

// Rows indexed by active points, columns by support points, entry
// (f_i - f_j)/(z_i - z_j). The index lists must not overlap.
Matrix loewner_matrix(const SampleSet& samples, const std::vector<Index>& support_idx,
                      const std::vector<Index>& active_idx);

// Max |f_i - r(z_i)| and its argmax over active points (those whose z does
// not coincide with a support point); ties break to the lowest index.
std::pair<double, Index> max_sample_error(const BarycentricRational& r,
                                          const SampleSet& samples);

std::pair<BarycentricRational, AaaTrace> aaa_exact(const SampleSet& samples,
                                                   double tol, Index max_degree);

struct AaaSketchOptions {
  SketchKind kind = SketchKind::srft;
  // Overrides s = 2*max_degree; s = m turns the sketch into an exact unitary
  // embedding, which reproduces aaa_exact and is used as a test oracle.
  std::optional<Index> sketch_size;
  // Records per-iteration consistency_error in the trace (costs one fresh
  // sketch application of the full Loewner matrix per iteration).
  bool check_consistency = false;
};

std::pair<BarycentricRational, AaaTrace> aaa_sketched(
    const SampleSet& samples, double tol, Index max_degree, std::uint64_t seed,
    const AaaSketchOptions& options = {});

}  // namespace nullsketch
