#include "nullsketch/perturb.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nullsketch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_negative(double value, const char* what) {
  if (!(value >= 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be non-negative");
  }
}

double gap_denominator(const GapParams& params) {
  require_non_negative(params.alpha, "alpha");
  require_non_negative(params.delta, "delta");
  double top = params.alpha + params.delta;
  return chi(params.alpha * params.alpha, top * top);
}

// Shared body of the four a priori bounds. Conditions and denominators come
// in two flavours; g = sigma_gap, t = sigma_tail.
std::optional<double> apriori_wide(double g, double t) {
  if (!(g > 1.6 * t)) return std::nullopt;
  return kAprioriNumerator * g * t / (g * g - 2.56 * t * t);
}

std::optional<double> apriori_narrow(double g, double t) {
  if (!(0.4 * g > t)) return std::nullopt;
  return kAprioriNumerator * g * t / (0.16 * g * g - t * t);
}

}  // namespace

double chi(double a, double b) {
  require_non_negative(a, "chi: a");
  require_non_negative(b, "chi: b");
  double diff = std::abs(a - b);
  if (diff == 0.0) return 0.0;
  double root = std::sqrt(a) * std::sqrt(b);
  if (root == 0.0) return kInf;
  return diff / root;
}

double theorem_bound_R(const Matrix& X, const Matrix& U, const GapParams& params,
                       MatrixNorm norm) {
  if (X.rows() != U.rows()) {
    throw std::invalid_argument("theorem_bound_R: X and U row counts differ");
  }
  if (X.rows() > 4096) {
    throw std::invalid_argument("theorem_bound_R: explicit operators are capped at 4096 rows");
  }
  if (X.cols() < U.cols()) {
    throw std::invalid_argument("theorem_bound_R: X must have at least as many columns as U");
  }
  Matrix xu = matmul(adjoint(X), U);
  QrFactorization qr = thin_qr(xu);
  const Index n = U.cols();
  double dmin = kInf, dmax = 0.0;
  for (Index j = 0; j < n; ++j) {
    double d = std::abs(qr.R(j, j));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmin <= 1e-13 * dmax) {
    throw std::runtime_error("theorem_bound_R: X*U is numerically rank deficient");
  }
  Matrix diff = qr.R.visit([](const auto& r) {
    using Mat = std::decay_t<decltype(r)>;
    Mat inv = r.template triangularView<Eigen::Upper>().solve(Mat::Identity(r.rows(), r.cols()));
    return Matrix(Mat(r - inv.adjoint()));
  });
  double numerator = norm == MatrixNorm::spectral ? singular_values(diff)(0)
                                                  : frobenius_norm(diff);
  return numerator / gap_denominator(params);
}

double corollary_bound(const GapParams& params) {
  return kCorollaryConstant / gap_denominator(params);
}

std::optional<double> apriori_bound_same_dim(double sigma_gap, double sigma_tail,
                                             SameDimBranch branch) {
  require_non_negative(sigma_gap, "sigma_gap");
  require_non_negative(sigma_tail, "sigma_tail");
  return branch == SameDimBranch::b1 ? apriori_wide(sigma_gap, sigma_tail)
                                     : apriori_narrow(sigma_gap, sigma_tail);
}

std::optional<double> apriori_bound_diff_dim(double sigma_gap, double sigma_tail,
                                             DiffDimBranch branch) {
  require_non_negative(sigma_gap, "sigma_gap");
  require_non_negative(sigma_tail, "sigma_tail");
  return branch == DiffDimBranch::b3 ? apriori_narrow(sigma_gap, sigma_tail)
                                     : apriori_wide(sigma_gap, sigma_tail);
}

AngleReport measure_angles(const Matrix& a, const Matrix& atil, Index k,
                           std::optional<Index> l) {
  if (a.cols() != atil.cols()) {
    throw std::invalid_argument("measure_angles: column counts differ");
  }
  const Index n = a.cols();
  if (k < 1 || k >= n) throw std::invalid_argument("measure_angles: need 1 <= k < n");
  if (l && (*l < 1 || *l >= k)) throw std::invalid_argument("measure_angles: need 1 <= l < k");
  SvdFactorization fa = svd(a);
  SvdFactorization ft = svd(atil);
  auto trailing = [n](const SvdFactorization& f, Index count) {
    return SubspaceBasis::unchecked(col_block(f.V, n - count, count));
  };
  auto branch = [&](std::string pairing, const SubspaceBasis& left, const SubspaceBasis& right,
                    double alpha, double top) {
    AngleBranch b;
    b.pairing = std::move(pairing);
    b.angles = canonical_angles(left, right);
    b.params = {alpha, top - alpha};
    b.admissible = b.params.delta > 0.0;
    return b;
  };

  AngleReport report;
  // 0-based reads from the non-increasing spectra: sigma_{n-k} sits at
  // n-k-1, sigma_{n-k+1} at n-k, sigma_{n-l+1} at n-l.
  if (!l) {
    SubspaceBasis v2 = trailing(fa, k);
    SubspaceBasis v2t = trailing(ft, k);
    AngleBranch first = branch("trailing-k(A) vs trailing-k(Atil)", v2, v2t,
                               ft.S(n - k), fa.S(n - k - 1));
    AngleBranch second = first;
    second.params = {fa.S(n - k), ft.S(n - k - 1) - fa.S(n - k)};
    second.admissible = second.params.delta > 0.0;
    report.branches = {std::move(first), std::move(second)};
    return report;
  }
  report.branches.push_back(branch("trailing-l(A) vs trailing-k(Atil)", trailing(fa, *l),
                                   trailing(ft, k), fa.S(n - *l), ft.S(n - k - 1)));
  report.branches.push_back(branch("trailing-k(A) vs trailing-l(Atil)", trailing(fa, k),
                                   trailing(ft, *l), ft.S(n - *l), fa.S(n - k - 1)));
  return report;
}

}  // namespace nullsketch
