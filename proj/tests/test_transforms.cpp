#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nullsketch/transforms.hpp"
#include "test_support.hpp"

using namespace nullsketch;

namespace {

// Dense unitary inverse-DFT matrix, built straight from the definition.
ComplexMatrix dense_idft(Index m) {
  ComplexMatrix f(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      double ang = 2.0 * M_PI * static_cast<double>(a) * static_cast<double>(b) /
                   static_cast<double>(m);
      f(a, b) = Complex(scale * std::cos(ang), scale * std::sin(ang));
    }
  return f;
}

// Dense orthonormal DCT-III matrix (transpose of the orthonormal DCT-II).
RealMatrix dense_dct3(Index m) {
  RealMatrix c(m, m);
  for (Index j = 0; j < m; ++j) {
    double cj = (j == 0) ? std::sqrt(1.0 / static_cast<double>(m))
                         : std::sqrt(2.0 / static_cast<double>(m));
    for (Index a = 0; a < m; ++a)
      c(a, j) = cj * std::cos(M_PI * static_cast<double>(j) *
                              (2.0 * static_cast<double>(a) + 1.0) /
                              (2.0 * static_cast<double>(m)));
  }
  return c;
}

}  // namespace

TEST_CASE("idft matches the dense definition on assorted lengths") {
  for (Index m : {1, 2, 7, 12, 16, 100}) {
    ComplexMatrix x = nstest::random_complex(m, 3, 500 + static_cast<std::uint64_t>(m));
    ComplexMatrix expected = dense_idft(m) * x;
    ComplexMatrix y = x;
    idft_unitary_columns(y);
    CHECK((y - expected).cwiseAbs().maxCoeff() <= 1e-12 * x.norm());
  }
}

TEST_CASE("idft preserves column norms") {
  ComplexMatrix x = nstest::random_complex(250, 4, 501);
  ComplexMatrix y = x;
  idft_unitary_columns(y);
  for (Index j = 0; j < 4; ++j)
    CHECK(y.col(j).norm() == doctest::Approx(x.col(j).norm()).epsilon(1e-12));
}

TEST_CASE("dct3 matches the dense definition on assorted lengths") {
  for (Index m : {1, 2, 7, 12, 16, 100}) {
    RealMatrix x = nstest::random_real(m, 3, 600 + static_cast<std::uint64_t>(m));
    RealMatrix expected = dense_dct3(m) * x;
    RealMatrix y = x;
    dct3_unitary_columns(y);
    CHECK((y - expected).cwiseAbs().maxCoeff() <= 1e-12 * x.norm());
  }
}

TEST_CASE("dct3 is orthogonal") {
  const Index m = 64;
  RealMatrix x = nstest::random_real(m, 2, 601);
  RealMatrix y = x;
  dct3_unitary_columns(y);
  CHECK(y.norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  // orthogonality of the dense matrix itself
  RealMatrix c = dense_dct3(m);
  CHECK((c.transpose() * c - RealMatrix::Identity(m, m)).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("closed-form entries agree with the transforms") {
  const Index m = 37;
  for (Index j : {Index(0), Index(1), Index(18), Index(36)}) {
    ComplexMatrix e = ComplexMatrix::Zero(m, 1);
    e(j, 0) = 1.0;
    idft_unitary_columns(e);
    for (Index a = 0; a < m; ++a)
      CHECK(std::abs(e(a, 0) - idft_unitary_entry(m, a, j)) <= 1e-13);

    RealMatrix er = RealMatrix::Zero(m, 1);
    er(j, 0) = 1.0;
    dct3_unitary_columns(er);
    for (Index a = 0; a < m; ++a)
      CHECK(std::abs(er(a, 0) - dct3_unitary_entry(m, a, j)) <= 1e-13);
  }
}
