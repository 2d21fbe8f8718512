#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nullsketch/matrix.hpp"
#include "nullsketch/rng.hpp"

namespace nullsketch {

enum class SketchKind { gaussian, srft, srdct };

std::string to_string(SketchKind kind);
SketchKind sketch_kind_from_string(const std::string& name);

// Recommended sketch sizes: 2n for the subsampled transforms, 4n for gaussian.
Index default_sketch_size(SketchKind kind, Index n);

// A sketched matrix stays s x n no matter how many row updates or downdates
// the underlying matrix has seen. operator_id ties it to the operator that
// produced it; mixing sketches across operators is an error.
struct SketchedMatrix {
  Matrix data;
  std::uint64_t operator_id = 0;
};

// Random sketching operator S in C^{s x m}. Three kinds:
//   gaussian  dense i.i.d. N(0,1) matrix, scaled by 1/sqrt(s) at apply time
//   srft      sqrt(m/s) * R * F^* * D with random signs D, unitary inverse DFT
//             F^*, and a uniform sample R of s out of m coordinates
//   srdct     real analogue with the orthonormal DCT-III in place of F^*
//
// The transform length is exactly m; inputs are never zero padded. Row
// updates append fresh gaussian columns drawn from a private stream owned by
// the operator, so replays are reproducible regardless of what the caller
// does with other generators. Row downdates never shrink m: for the
// subsampled kinds the removed row is only recorded, and its contribution is
// subtracted from the sketch; for gaussian the matching column is zeroed.
class SketchOperator {
 public:
  static SketchOperator draw(SketchKind kind, Index s, Index m, std::uint64_t seed);

  // Round trip through descriptor(): a small JSON document with enough state
  // (kind, s, m, seed, appended column count, zeroed rows) to rebuild the
  // operator deterministically.
  static SketchOperator from_descriptor(const std::string& json_text);
  std::string descriptor() const;

  SketchKind kind() const { return kind_; }
  Index s() const { return s_; }
  Index m() const { return m_; }
  Index appended_count() const { return appended_.cols(); }
  Index m_effective() const { return m_ + appended_.cols(); }
  Index live_rows() const { return m_effective() - static_cast<Index>(zeroed_.size()); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return id_; }
  const std::vector<Index>& zeroed_rows() const { return zeroed_; }

  // Explicit s x m_effective matrix currently applied, scaling included.
  // Intended for tests and small-scale oracles; cost O(s * m).
  Matrix dense() const;

 private:
  SketchOperator() = default;

  Matrix sketch_vector(Index j) const;  // column j of dense(), as s x 1
  void zero_row(Index j);

  SketchKind kind_ = SketchKind::gaussian;
  Index s_ = 0;
  Index m_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t id_ = 0;
  RealMatrix gauss_;               // gaussian kind only, s x m, unscaled
  RealVector signs_;               // srft/srdct, length m, entries +-1
  std::vector<Index> sample_idx_;  // srft/srdct, sorted, s distinct entries
  RealMatrix appended_;            // fresh columns from row updates, s x p
  std::vector<Index> zeroed_;      // sorted indices removed by row downdates
  PhiloxStream update_stream_{0, 0};

  friend SketchedMatrix apply(const SketchOperator&, const Matrix&);
  friend SketchedMatrix update_row(const SketchedMatrix&, SketchOperator&, const Matrix&);
  friend SketchedMatrix downdate_row(const SketchedMatrix&, SketchOperator&, Index, const Matrix&);
};

// SA = S applied to A; A must have m_effective rows. srft output is complex;
// gaussian keeps the input kind; srdct accepts real input only.
SketchedMatrix apply(const SketchOperator& S, const Matrix& A);

// Insert the sketch of a_col (length m_effective, entries at zeroed rows are
// forced to zero) at the given column position.
SketchedMatrix update_column(const SketchedMatrix& sa, const SketchOperator& S,
                             const Matrix& a_col, Index position);

// Remove a column. Exact splice, no arithmetic.
SketchedMatrix downdate_column(const SketchedMatrix& sa, Index position);

// Append row a_row (1 x n) to the underlying matrix: draws a fresh gaussian
// column g, returns SA + g a_row / sqrt(s). Mutates S (stream and appended
// columns); used for every kind.
SketchedMatrix update_row(const SketchedMatrix& sa, SketchOperator& S, const Matrix& a_row);

// Remove row j, whose current content is a_row_j (1 x n): subtracts
// (S e_j) a_row_j. For srft/srdct the sketched basis vector has a closed
// form costing O(s). Warns on stderr once live rows drop below 2s.
SketchedMatrix downdate_row(const SketchedMatrix& sa, SketchOperator& S, Index j,
                            const Matrix& a_row_j);

}  // namespace nullsketch
