#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace nullsketch;

namespace {

void check_svd_contract(const Matrix& a, double tol = 1e-12) {
  SvdFactorization f = svd(a);
  const Index k = std::min(a.rows(), a.cols());
  REQUIRE(f.S.size() == k);
  for (Index i = 0; i < k; ++i) {
    CHECK(f.S(i) >= 0.0);
    if (i > 0) CHECK(f.S(i) <= f.S(i - 1));
  }
  Matrix gram_u = matmul(adjoint(f.U), f.U);
  Matrix gram_v = matmul(adjoint(f.V), f.V);
  ComplexMatrix iu = gram_u.to_complex() - ComplexMatrix::Identity(k, k);
  ComplexMatrix iv = gram_v.to_complex() - ComplexMatrix::Identity(k, k);
  CHECK(iu.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(iv.cwiseAbs().maxCoeff() <= 1e-12);
  ComplexMatrix rec =
      f.U.to_complex() * f.S.cast<Complex>().asDiagonal() * f.V.to_complex().adjoint();
  double resid = (a.to_complex() - rec).norm();
  CHECK(resid <= tol * frobenius_norm(a));
}

}  // namespace

TEST_CASE("svd of the identity") {
  SvdFactorization f = svd(Matrix(RealMatrix::Identity(3, 3)));
  for (int i = 0; i < 3; ++i) CHECK(f.S(i) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(max_abs_diff(matmul(f.U, adjoint(f.V)), Matrix(RealMatrix::Identity(3, 3))) <=
        1e-13);
}

TEST_CASE("svd of a permuted diagonal") {
  RealMatrix a(3, 3);
  a << 0, 2, 0,
       3, 0, 0,
       0, 0, 1;
  SvdFactorization f = svd(Matrix(a));
  CHECK(f.S(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(f.S(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.S(2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("svd reconstruction on random input") {
  check_svd_contract(Matrix(nstest::random_real(8, 5, 101)));
  check_svd_contract(Matrix(nstest::random_complex(8, 5, 102)));
  check_svd_contract(Matrix(nstest::random_real(5, 8, 103)));
}

TEST_CASE("svd rejects empty input") {
  CHECK_THROWS_AS(svd(Matrix()), std::invalid_argument);
}

TEST_CASE("singular_values matches full svd") {
  Matrix a(nstest::random_complex(9, 4, 104));
  RealVector s1 = singular_values(a);
  RealVector s2 = svd(a).S;
  CHECK((s1 - s2).cwiseAbs().maxCoeff() <= 1e-12 * s1(0));
}

TEST_CASE("thin_qr of an orthonormal input returns it unchanged") {
  RealMatrix q0 = nstest::random_orthonormal(7, 3, 201);
  QrFactorization f = thin_qr(Matrix(q0));
  CHECK(max_abs_diff(f.R, Matrix(RealMatrix::Identity(3, 3))) <= 1e-12);
  CHECK((f.Q.real() - q0).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("thin_qr of orthogonal columns exposes their norms") {
  RealMatrix a(3, 2);
  a << 2, 0,
       0, 0,
       0, 3;
  QrFactorization f = thin_qr(Matrix(a));
  CHECK(f.R.real()(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.R.real()(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(f.R.real()(0, 1)) <= 1e-14);
}

TEST_CASE("thin_qr sign convention flips negative diagonals") {
  RealMatrix a(2, 2);
  a << 3, 0,
       0, -2;
  QrFactorization f = thin_qr(Matrix(a));
  CHECK(f.R.real()(0, 0) == doctest::Approx(3.0));
  CHECK(f.R.real()(1, 1) == doctest::Approx(2.0));
  CHECK(f.Q.real()(1, 1) == doctest::Approx(-1.0));
}

TEST_CASE("thin_qr sign convention rotates complex phases") {
  ComplexMatrix a(1, 1);
  a << Complex(0, 2);
  QrFactorization f = thin_qr(Matrix(a));
  CHECK(f.R.cplx()(0, 0).real() == doctest::Approx(2.0));
  CHECK(std::abs(f.R.cplx()(0, 0).imag()) <= 1e-15);
  CHECK(std::abs(f.Q.cplx()(0, 0) - Complex(0, 1)) <= 1e-15);
}

TEST_CASE("thin_qr reconstructs random input") {
  for (std::uint64_t seed : {301, 302}) {
    Matrix a(nstest::random_real(10, 4, seed));
    QrFactorization f = thin_qr(a);
    CHECK(frobenius_norm(Matrix(RealMatrix(a.real() - f.Q.real() * f.R.real()))) <=
          1e-12 * frobenius_norm(a));
    for (Index j = 0; j < 4; ++j) {
      CHECK(f.R.real()(j, j) >= 0.0);
      for (Index i = j + 1; i < 4; ++i) CHECK(f.R.real()(i, j) == 0.0);
    }
  }
  Matrix c(nstest::random_complex(10, 4, 303));
  QrFactorization fc = thin_qr(c);
  ComplexMatrix resid = c.cplx() - fc.Q.cplx() * fc.R.cplx();
  CHECK(resid.norm() <= 1e-12 * c.cplx().norm());
  for (Index j = 0; j < 4; ++j) {
    CHECK(fc.R.cplx()(j, j).imag() == 0.0);
    CHECK(fc.R.cplx()(j, j).real() >= 0.0);
  }
}

TEST_CASE("thin_qr tolerates rank deficiency") {
  RealMatrix a = nstest::random_real(6, 2, 304);
  RealMatrix b(6, 3);
  b << a.col(0), a.col(1), a.col(0) + a.col(1);
  QrFactorization f = thin_qr(Matrix(b));
  CHECK(frobenius_norm(Matrix(RealMatrix(b - f.Q.real() * f.R.real()))) <=
        1e-12 * b.norm());
}

TEST_CASE("thin_qr requires tall input") {
  CHECK_THROWS_AS(thin_qr(Matrix(RealMatrix::Zero(2, 3))), std::invalid_argument);
}

TEST_CASE("subspace basis validation") {
  CHECK_THROWS_AS(SubspaceBasis(Matrix(RealMatrix::Ones(3, 2))), std::invalid_argument);
  CHECK_NOTHROW(SubspaceBasis(Matrix(nstest::random_orthonormal(6, 2, 401))));
}

TEST_CASE("canonical angles of identical bases vanish") {
  SubspaceBasis u = SubspaceBasis::unchecked(Matrix(nstest::random_orthonormal(9, 3, 402)));
  RealVector ang = canonical_angles(u, u);
  REQUIRE(ang.size() == 3);
  CHECK(ang.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("canonical angles of orthogonal and oblique lines") {
  RealMatrix e1 = RealMatrix::Zero(2, 1);
  e1(0, 0) = 1;
  RealMatrix e2 = RealMatrix::Zero(2, 1);
  e2(1, 0) = 1;
  RealMatrix diag(2, 1);
  diag << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

  auto U = SubspaceBasis::unchecked(Matrix(e1));
  auto V = SubspaceBasis::unchecked(Matrix(e2));
  auto D = SubspaceBasis::unchecked(Matrix(diag));
  CHECK(canonical_angles(U, V)(0) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(canonical_angles(U, D)(0) == doctest::Approx(M_PI / 4).epsilon(1e-12));
}

TEST_CASE("canonical angles are symmetric and handle unequal dimensions") {
  SubspaceBasis u = SubspaceBasis::unchecked(Matrix(nstest::random_orthonormal(12, 4, 403)));
  SubspaceBasis v = SubspaceBasis::unchecked(Matrix(nstest::random_orthonormal(12, 2, 404)));
  RealVector a1 = canonical_angles(u, v);
  RealVector a2 = canonical_angles(v, u);
  REQUIRE(a1.size() == 2);
  CHECK((a1 - a2).cwiseAbs().maxCoeff() <= 1e-12);
  for (Index i = 1; i < a1.size(); ++i) CHECK(a1(i) >= a1(i - 1));
  CHECK_THROWS_AS(
      canonical_angles(u, SubspaceBasis::unchecked(Matrix(nstest::random_orthonormal(11, 2, 405)))),
      std::invalid_argument);
}

TEST_CASE("canonical angles resolve tiny rotations accurately") {
  const double eps = 1e-9;
  RealMatrix u = RealMatrix::Zero(2, 1);
  u(0, 0) = 1;
  RealMatrix v(2, 1);
  v << std::cos(eps), std::sin(eps);
  RealVector ang = canonical_angles(SubspaceBasis::unchecked(Matrix(u)),
                                    SubspaceBasis::unchecked(Matrix(v)));
  CHECK(ang(0) == doctest::Approx(eps).epsilon(1e-6));
}

TEST_CASE("sin_theta_norm endpoints") {
  RealMatrix e1 = RealMatrix::Zero(2, 1);
  e1(0, 0) = 1;
  RealMatrix e2 = RealMatrix::Zero(2, 1);
  e2(1, 0) = 1;
  auto U = SubspaceBasis::unchecked(Matrix(e1));
  auto V = SubspaceBasis::unchecked(Matrix(e2));
  CHECK(sin_theta_norm(U, U, MatrixNorm::spectral) <= 1e-14);
  CHECK(sin_theta_norm(U, V, MatrixNorm::spectral) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sin_theta_norm agrees with the cosine identity") {
  SubspaceBasis u = SubspaceBasis::unchecked(Matrix(nstest::random_orthonormal(20, 3, 406)));
  SubspaceBasis v = SubspaceBasis::unchecked(Matrix(nstest::random_orthonormal(20, 3, 407)));
  RealVector cosines = singular_values(matmul(adjoint(u.matrix()), v.matrix()));
  double expected = std::sqrt(1.0 - cosines(2) * cosines(2));
  CHECK(sin_theta_norm(u, v, MatrixNorm::spectral) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(sin_theta_norm(u, v, MatrixNorm::frobenius) >=
        sin_theta_norm(u, v, MatrixNorm::spectral));
}

TEST_CASE("sin_theta_norm matches between complements") {
  const Index n = 14, k = 7;
  RealMatrix u = nstest::random_orthonormal(n, k, 408);
  RealMatrix v = nstest::random_orthonormal(n, k, 409);
  // complement frames via a full orthonormal extension
  auto extend = [n, k](const RealMatrix& b, std::uint64_t seed) {
    RealMatrix full(n, n);
    full << b, nstest::random_real(n, n - k, seed);
    return RealMatrix(thin_qr(Matrix(full)).Q.real().rightCols(n - k));
  };
  RealMatrix up = extend(u, 410);
  RealMatrix vp = extend(v, 411);
  double a = sin_theta_norm(SubspaceBasis::unchecked(Matrix(u)),
                            SubspaceBasis::unchecked(Matrix(v)), MatrixNorm::spectral);
  double b = sin_theta_norm(SubspaceBasis::unchecked(Matrix(up)),
                            SubspaceBasis::unchecked(Matrix(vp)), MatrixNorm::spectral);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("unitary invariance of singular values") {
  RealMatrix a = nstest::random_real(12, 5, 412);
  RealMatrix q = nstest::random_orthonormal(12, 12, 413);
  RealVector s1 = singular_values(Matrix(a));
  RealVector s2 = singular_values(Matrix(RealMatrix(q * a)));
  CHECK((s1 - s2).cwiseAbs().maxCoeff() <= 1e-12 * s1(0));
}

TEST_CASE("make_test_matrix coherent all-ones spectrum") {
  Matrix a = make_test_matrix(8, 3, RealVector::Ones(3), LeftFactorMode::coherent,
                              RightFactorMode::haar, 1);
  RealMatrix top = a.real().topRows(3);
  RealMatrix bottom = a.real().bottomRows(5);
  CHECK((top.transpose() * top - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK(bottom.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("make_test_matrix respects a prescribed spectrum") {
  RealVector spec(5);
  for (int i = 0; i < 5; ++i) spec(i) = std::pow(10.0, -2.5 * i);  // 1 .. 1e-10
  Matrix a = make_test_matrix(50, 5, spec, LeftFactorMode::haar,
                              RightFactorMode::haar, 99);
  RealVector s = singular_values(a);
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(s(i) - spec(i)) <= 1e-12 * std::max(1.0, spec(i)));
}

TEST_CASE("make_test_matrix realizes the two-cliff spectrum") {
  RealVector spec = RealVector::Ones(100);
  spec(98) = 1e-1;
  spec(99) = 1e-6;
  Matrix a = make_test_matrix(1000, 100, spec, LeftFactorMode::haar,
                              RightFactorMode::haar, 7);
  RealVector s = singular_values(a);
  CHECK(s(98) / s(99) == doctest::Approx(1e5).epsilon(1e-6));
}

TEST_CASE("make_test_matrix is deterministic in the seed") {
  RealVector spec(4);
  spec << 4, 3, 2, 1;
  Matrix a = make_test_matrix(9, 4, spec, LeftFactorMode::haar, RightFactorMode::haar, 5);
  Matrix b = make_test_matrix(9, 4, spec, LeftFactorMode::haar, RightFactorMode::haar, 5);
  Matrix c = make_test_matrix(9, 4, spec, LeftFactorMode::haar, RightFactorMode::haar, 6);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(max_abs_diff(a, c) > 0.0);
}

TEST_CASE("make_test_matrix validates the spectrum") {
  RealVector bad(3);
  bad << 1, 2, 3;
  CHECK_THROWS_AS(make_test_matrix(5, 3, bad, LeftFactorMode::haar,
                                   RightFactorMode::haar, 1),
                  std::invalid_argument);
  RealVector neg(2);
  neg << 1, -0.5;
  CHECK_THROWS_AS(make_test_matrix(5, 2, neg, LeftFactorMode::haar,
                                   RightFactorMode::haar, 1),
                  std::invalid_argument);
}
