#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "doctest.h"
#include "nullsketch/perturb.hpp"
#include "nullsketch/sketch.hpp"
#include "test_support.hpp"

using namespace nullsketch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RealVector geometric_spectrum(Index n, double last) {
  RealVector s(n);
  for (Index i = 0; i < n; ++i) s(i) = std::pow(last, i / (n - 1.0));
  return s;
}

double max_sine(const RealVector& angles) {
  return angles.size() == 0 ? 0.0 : std::sin(angles(angles.size() - 1));
}

double fro_sine(const RealVector& angles) {
  return std::sqrt(angles.array().sin().square().sum());
}

}  // namespace

TEST_CASE("relative gap basics") {
  CHECK(chi(0.0, 0.0) == 0.0);
  CHECK(chi(3.7, 3.7) == 0.0);
  CHECK(chi(1.0, 0.0) == kInf);
  CHECK(chi(0.0, 2.5) == kInf);
  CHECK(chi(1.0, 4.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(chi(2.0, 5.0) == chi(5.0, 2.0));
  CHECK(chi(3.0 * 2.0, 3.0 * 5.0) == doctest::Approx(chi(2.0, 5.0)).epsilon(1e-14));
  // Tiny magnitudes where the naive product would underflow to zero.
  CHECK(chi(1e-300, 2e-300) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(chi(-1.0, 1.0), std::invalid_argument);
  // A finite sine is trivially below an infinite gap value.
  CHECK(0.999 <= chi(1.0, 0.0));
}

TEST_CASE("corollary bound") {
  SUBCASE("shrinks to zero as the gap widens") {
    double prev = kInf;
    for (double delta : {1.0, 1e3, 1e6, 1e9}) {
      double b = corollary_bound({1.0, delta});
      CHECK(b < prev);
      prev = b;
    }
    CHECK(prev < 1e-8);
  }
  SUBCASE("matches the alpha beta / (beta^2 - alpha^2) form") {
    auto closed = [](double alpha, double beta) {
      return 2.1 * alpha * beta / (beta * beta - alpha * alpha);
    };
    for (auto [alpha, beta] : {std::pair{0.9e-6, 0.1}, {0.3, 0.7}, {1e-4, 2.0}}) {
      CHECK(corollary_bound({alpha, beta - alpha}) ==
            doctest::Approx(closed(alpha, beta)).epsilon(1e-12));
    }
  }
  SUBCASE("degenerate gaps follow the chi conventions") {
    CHECK(corollary_bound({1.0, 0.0}) == kInf);
    CHECK(corollary_bound({0.0, 1.0}) == 0.0);
    CHECK_THROWS_AS(corollary_bound({-1.0, 1.0}), std::invalid_argument);
  }
}

TEST_CASE("theorem bound from the QR factor") {
  SUBCASE("an isometric perturbation gives a zero bound") {
    // Exactly orthonormal columns (0/1 entries): the bound vanishes exactly.
    RealMatrix e = RealMatrix::Identity(40, 6);
    CHECK(theorem_bound_R(Matrix(e), Matrix(e), {1.0, 1.0}, MatrixNorm::spectral) == 0.0);
    // Computed Haar factor: orthonormal to roundoff only.
    RealMatrix u = nstest::random_orthonormal(40, 6, 1);
    double b = theorem_bound_R(Matrix(u), Matrix(u), {1.0, 1.0}, MatrixNorm::spectral);
    CHECK(b < 1e-12);
  }
  SUBCASE("R = diag(1.6, 0.4) realizes the window constant") {
    RealMatrix x = RealMatrix::Zero(10, 2);
    x(0, 0) = 1.6;
    x(1, 1) = 0.4;
    RealMatrix u = RealMatrix::Identity(10, 2);
    // chi(1, phi^2) = 1 at the golden ratio, so the bound is the norm itself.
    GapParams golden{1.0, (1.0 + std::sqrt(5.0)) / 2.0 - 1.0};
    double spec = theorem_bound_R(Matrix(x), Matrix(u), golden, MatrixNorm::spectral);
    double fro = theorem_bound_R(Matrix(x), Matrix(u), golden, MatrixNorm::frobenius);
    CHECK(spec == doctest::Approx(2.1).epsilon(1e-12));
    CHECK(fro == doctest::Approx(2.31530235606497).epsilon(1e-12));
    CHECK(fro >= spec);
  }
  SUBCASE("guards") {
    Matrix big = Matrix::zeros(4097, 2, ScalarKind::real);
    CHECK_THROWS_AS(theorem_bound_R(big, big, {1.0, 1.0}, MatrixNorm::spectral),
                    std::invalid_argument);
    RealMatrix u = RealMatrix::Identity(6, 2);
    RealMatrix x = RealMatrix::Zero(6, 2);
    x(3, 0) = 1.0;
    x(4, 1) = 1.0;  // orthogonal to u: X*U = 0
    CHECK_THROWS_AS(theorem_bound_R(Matrix(x), Matrix(u), {1.0, 1.0}, MatrixNorm::spectral),
                    std::runtime_error);
    CHECK_THROWS_AS(theorem_bound_R(Matrix(RealMatrix(RealMatrix::Identity(6, 1))), Matrix(u),
                                    {1.0, 1.0}, MatrixNorm::spectral),
                    std::invalid_argument);
  }
}

TEST_CASE("the deterministic inequality holds on random instances") {
  const Index m = 200, s = 80, n = 12, k = 3;
  RealVector spectrum(n);
  for (Index i = 0; i < n; ++i) spectrum(i) = i < n - k ? 1.0 - 0.05 * i : 1e-3 * std::pow(0.5, i - (n - k));
  for (int seed = 0; seed < 5; ++seed) {
    for (SketchKind kind : {SketchKind::gaussian, SketchKind::srft}) {
      CAPTURE(seed);
      CAPTURE(to_string(kind));
      Matrix a = make_test_matrix(m, n, spectrum, LeftFactorMode::haar, RightFactorMode::haar,
                                  500 + seed);
      SketchOperator S = SketchOperator::draw(kind, s, m, 600 + seed);
      Matrix atil = apply(S, a).data;
      Matrix x = adjoint(S.dense());
      Matrix u = svd(a).U;

      AngleReport same = measure_angles(a, atil, k);
      for (const AngleBranch& br : same.branches) {
        REQUIRE(br.admissible);
        double bs = theorem_bound_R(x, u, br.params, MatrixNorm::spectral);
        double bf = theorem_bound_R(x, u, br.params, MatrixNorm::frobenius);
        CHECK(max_sine(br.angles) <= bs + 1e-12);
        CHECK(fro_sine(br.angles) <= bf + 1e-12);
        CHECK(bf >= bs);
      }
      AngleReport diff = measure_angles(a, atil, k, 1);
      for (const AngleBranch& br : diff.branches) {
        REQUIRE(br.admissible);
        double bs = theorem_bound_R(x, u, br.params, MatrixNorm::spectral);
        CHECK(max_sine(br.angles) <= bs + 1e-12);
      }
    }
  }
}

TEST_CASE("measured angles of trivial perturbations") {
  const Index m = 60, n = 10, k = 2;
  RealVector spectrum = geometric_spectrum(n, 1e-4);
  Matrix a = make_test_matrix(m, n, spectrum, LeftFactorMode::haar, RightFactorMode::haar, 20);
  SUBCASE("identical matrices have zero angles") {
    AngleReport rep = measure_angles(a, a, k);
    REQUIRE(rep.branches.size() == 2);
    for (const AngleBranch& br : rep.branches) {
      CHECK(max_sine(br.angles) < 1e-12);
      CHECK(br.angles.size() == k);
    }
  }
  SUBCASE("a unitary factor moves nothing") {
    ComplexMatrix q = nstest::random_unitary_frame(m, m, 21);
    Matrix atil = matmul(Matrix(q), a);
    AngleReport rep = measure_angles(a, atil, k);
    for (const AngleBranch& br : rep.branches) CHECK(max_sine(br.angles) < 1e-10);
  }
  SUBCASE("scaling shifts the extracted gap parameters, not the angles") {
    Matrix atil = matmul(Matrix(RealMatrix(2.0 * RealMatrix::Identity(m, m))), a);
    AngleReport rep = measure_angles(a, atil, k);
    REQUIRE(rep.branches.size() == 2);
    // First branch reads alpha from the perturbed spectrum, the top of the
    // gap from the original one; the second swaps the roles.
    CHECK(rep.branches[0].params.alpha ==
          doctest::Approx(2.0 * spectrum(n - k)).epsilon(1e-10));
    CHECK(rep.branches[0].params.alpha + rep.branches[0].params.delta ==
          doctest::Approx(spectrum(n - k - 1)).epsilon(1e-10));
    CHECK(rep.branches[1].params.alpha == doctest::Approx(spectrum(n - k)).epsilon(1e-10));
    CHECK(rep.branches[1].params.alpha + rep.branches[1].params.delta ==
          doctest::Approx(2.0 * spectrum(n - k - 1)).epsilon(1e-10));
    for (const AngleBranch& br : rep.branches) CHECK(max_sine(br.angles) < 1e-10);
  }
  SUBCASE("different-dimension pairings") {
    Matrix atil = matmul(Matrix(RealMatrix(2.0 * RealMatrix::Identity(m, m))), a);
    AngleReport rep = measure_angles(a, atil, k, 1);
    REQUIRE(rep.branches.size() == 2);
    CHECK(rep.branches[0].angles.size() == 1);
    CHECK(rep.branches[1].angles.size() == 1);
    CHECK(rep.branches[0].params.alpha == doctest::Approx(spectrum(n - 1)).epsilon(1e-10));
    CHECK(rep.branches[0].params.alpha + rep.branches[0].params.delta ==
          doctest::Approx(2.0 * spectrum(n - k - 1)).epsilon(1e-10));
    CHECK(rep.branches[1].params.alpha ==
          doctest::Approx(2.0 * spectrum(n - 1)).epsilon(1e-10));
    CHECK(rep.branches[1].params.alpha + rep.branches[1].params.delta ==
          doctest::Approx(spectrum(n - k - 1)).epsilon(1e-10));
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS(measure_angles(a, Matrix(nstest::random_real(m, n + 1, 22)), k),
                    std::invalid_argument);
    CHECK_THROWS_AS(measure_angles(a, a, 0), std::invalid_argument);
    CHECK_THROWS_AS(measure_angles(a, a, n), std::invalid_argument);
    CHECK_THROWS_AS(measure_angles(a, a, k, 0), std::invalid_argument);
    CHECK_THROWS_AS(measure_angles(a, a, k, k), std::invalid_argument);
  }
}

TEST_CASE("a priori bounds") {
  SUBCASE("frozen values") {
    auto b1 = apriori_bound_same_dim(1.0, 1e-3, SameDimBranch::b1);
    REQUIRE(b1.has_value());
    CHECK(*b1 == doctest::Approx(0.0033600086016220203).epsilon(1e-14));
    auto b3 = apriori_bound_diff_dim(1.0, 0.01, DiffDimBranch::b3);
    REQUIRE(b3.has_value());
    CHECK(*b3 == doctest::Approx(0.2101313320825516).epsilon(1e-14));
    auto b4 = apriori_bound_diff_dim(1.0, 0.01, DiffDimBranch::b4);
    REQUIRE(b4.has_value());
    CHECK(*b4 == doctest::Approx(0.03360860380257346).epsilon(1e-14));
  }
  SUBCASE("zero tail collapses every branch to zero") {
    CHECK(*apriori_bound_same_dim(1.0, 0.0, SameDimBranch::b1) == 0.0);
    CHECK(*apriori_bound_same_dim(1.0, 0.0, SameDimBranch::b2) == 0.0);
    CHECK(*apriori_bound_diff_dim(1.0, 0.0, DiffDimBranch::b3) == 0.0);
    CHECK(*apriori_bound_diff_dim(1.0, 0.0, DiffDimBranch::b4) == 0.0);
  }
  SUBCASE("insufficient gaps are not applicable") {
    CHECK_FALSE(apriori_bound_same_dim(1.0, 0.9, SameDimBranch::b1).has_value());
    CHECK_FALSE(apriori_bound_same_dim(1.0, 0.9, SameDimBranch::b2).has_value());
    CHECK_FALSE(apriori_bound_same_dim(1.6, 1.0, SameDimBranch::b1).has_value());
    CHECK_FALSE(apriori_bound_same_dim(1.0, 0.4, SameDimBranch::b2).has_value());
  }
  SUBCASE("decay rate is sigma_tail over sigma_gap times the numerator") {
    for (double ratio : {1e-3, 1e-6}) {
      auto b4 = apriori_bound_diff_dim(1.0, ratio, DiffDimBranch::b4);
      REQUIRE(b4.has_value());
      CHECK(*b4 == doctest::Approx(3.36 * ratio).epsilon(1e-2));
    }
  }
  SUBCASE("negative inputs are rejected") {
    CHECK_THROWS_AS(apriori_bound_same_dim(-1.0, 0.1, SameDimBranch::b1), std::invalid_argument);
    CHECK_THROWS_AS(apriori_bound_diff_dim(1.0, -0.1, DiffDimBranch::b3), std::invalid_argument);
  }
}
