#pragma once

#include "nullsketch/matrix.hpp"

namespace nullsketch {

/// In-place F^* X on every column, where F is the unitary DFT of length
/// X.rows(): (F^* x)_a = (1/sqrt(m)) sum_b x_b exp(+2*pi*i*a*b/m).
/// Works for any length m (mixed-radix under the hood), O(m log m) per column.
void idft_unitary_columns(ComplexMatrix& x);

/// In-place C^T X on every column, where C is the orthonormal DCT-II of
/// length X.rows(). C^T is the orthonormal DCT-III. Any length, O(m log m).
void dct3_unitary_columns(RealMatrix& x);

/// Column j of the transform actually applied by idft_unitary_columns,
/// i.e. F^*(:, j), evaluated at row `row`. Closed form, no FFT.
Complex idft_unitary_entry(Index m, Index row, Index j);

/// Column j of C^T evaluated at row `row` (closed form).
double dct3_unitary_entry(Index m, Index row, Index j);

}  // namespace nullsketch
