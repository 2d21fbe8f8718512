#include "nullsketch/aaa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "nullsketch/kernels.hpp"

namespace nullsketch {

namespace {

void validate_samples(const SampleSet& samples) {
  const Index m = samples.z.size();
  if (samples.f.size() != m)
    throw std::invalid_argument("aaa: z and f lengths differ");
  if (m < 2) throw std::invalid_argument("aaa: need at least two sample points");
  // Duplicate points would put zeros in Loewner denominators. Sort-based
  // check keeps this O(m log m) even at m = 1e4.
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Complex za = samples.z(a), zb = samples.z(b);
    if (za.real() != zb.real()) return za.real() < zb.real();
    return za.imag() < zb.imag();
  });
  for (std::size_t t = 1; t < order.size(); ++t) {
    if (samples.z(order[t - 1]) == samples.z(order[t]))
      throw std::invalid_argument("aaa: sample points must be pairwise distinct");
  }
}

void validate_greedy_args(const SampleSet& samples, double tol, Index max_degree) {
  validate_samples(samples);
  if (max_degree < 1) throw std::invalid_argument("aaa: max_degree must be at least 1");
  if (samples.z.size() <= max_degree)
    throw std::invalid_argument("aaa: need more sample points than max_degree");
  if (!(tol > 0.0)) throw std::invalid_argument("aaa: tol must be positive");
}

// The trailing singular vector is only determined up to a unit phase, and the
// two solvers factor different (equivalent) matrices. Rotating the largest
// entry to the positive real axis makes weights comparable across variants.
void normalize_phase(ComplexVector& w) {
  Index pivot = 0;
  double best = -1.0;
  for (Index j = 0; j < w.size(); ++j) {
    if (std::abs(w(j)) > best) {
      best = std::abs(w(j));
      pivot = j;
    }
  }
  if (best > 0.0) w *= std::conj(w(pivot)) / std::abs(w(pivot));
}

BarycentricRational build_rational(const SampleSet& samples,
                                   const std::vector<Index>& support,
                                   const ComplexVector& w) {
  const Index k = static_cast<Index>(support.size());
  BarycentricRational r;
  r.support_z.resize(k);
  r.support_f.resize(k);
  for (Index c = 0; c < k; ++c) {
    r.support_z(c) = samples.z(support[static_cast<std::size_t>(c)]);
    r.support_f(c) = samples.f(support[static_cast<std::size_t>(c)]);
  }
  r.weights = w;
  return r;
}

// Max |f_i - r(z_i)| over non-support points, ties to the lowest index.
// Inlined quotient evaluation; the support mask replaces eval's equality scan.
std::pair<double, Index> scan_errors(const SampleSet& samples,
                                     const BarycentricRational& r,
                                     const std::vector<bool>& is_support) {
  const Index m = samples.z.size();
  const Index k = r.weights.size();
  double max_err = 0.0;
  Index arg = 0;
  bool any = false;
  for (Index i = 0; i < m; ++i) {
    if (is_support[static_cast<std::size_t>(i)]) continue;
    Complex num(0.0, 0.0), den(0.0, 0.0);
    for (Index c = 0; c < k; ++c) {
      const Complex d = samples.z(i) - r.support_z(c);
      const Complex t = r.weights(c) / d;
      num += r.support_f(c) * t;
      den += t;
    }
    const double err = std::abs(samples.f(i) - num / den);
    if (!any || err > max_err) {
      max_err = err;
      arg = i;
      any = true;
    }
  }
  return {any ? max_err : 0.0, arg};
}

Index initial_pick(const SampleSet& samples) {
  const Complex mean = samples.f.mean();
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < samples.f.size(); ++i) {
    const double err = std::abs(samples.f(i) - mean);
    if (err > best) {
      best = err;
      arg = i;
    }
  }
  return arg;
}

// New Loewner column over the original m-row index space, zero at support
// rows (including the new point itself).
ComplexVector loewner_column(const SampleSet& samples, Index new_support,
                             const std::vector<bool>& is_support) {
  const Index m = samples.z.size();
  ComplexVector col = ComplexVector::Zero(m);
  const Complex zj = samples.z(new_support);
  const Complex fj = samples.f(new_support);
  for (Index i = 0; i < m; ++i) {
    if (is_support[static_cast<std::size_t>(i)]) continue;
    col(i) = (samples.f(i) - fj) / (samples.z(i) - zj);
  }
  return col;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Complex eval(const BarycentricRational& r, Complex z) {
  for (Index j = 0; j < r.support_z.size(); ++j) {
    if (r.support_z(j) == z) return r.support_f(j);
  }
  Complex num(0.0, 0.0), den(0.0, 0.0);
  for (Index j = 0; j < r.support_z.size(); ++j) {
    const Complex t = r.weights(j) / (z - r.support_z(j));
    num += r.support_f(j) * t;
    den += t;
  }
  return num / den;
}

Matrix loewner_matrix(const SampleSet& samples, const std::vector<Index>& support_idx,
                      const std::vector<Index>& active_idx) {
  validate_samples(samples);
  const Index m = samples.z.size();
  std::vector<bool> in_support(static_cast<std::size_t>(m), false);
  for (Index j : support_idx) {
    if (j < 0 || j >= m) throw std::out_of_range("loewner_matrix: support index out of range");
    in_support[static_cast<std::size_t>(j)] = true;
  }
  for (Index i : active_idx) {
    if (i < 0 || i >= m) throw std::out_of_range("loewner_matrix: active index out of range");
    if (in_support[static_cast<std::size_t>(i)])
      throw std::invalid_argument("loewner_matrix: support and active index sets overlap");
  }
  ComplexMatrix out(static_cast<Index>(active_idx.size()),
                    static_cast<Index>(support_idx.size()));
  for (std::size_t row = 0; row < active_idx.size(); ++row) {
    const Index i = active_idx[row];
    for (std::size_t col = 0; col < support_idx.size(); ++col) {
      const Index j = support_idx[col];
      out(static_cast<Index>(row), static_cast<Index>(col)) =
          (samples.f(i) - samples.f(j)) / (samples.z(i) - samples.z(j));
    }
  }
  return Matrix(std::move(out));
}

std::pair<double, Index> max_sample_error(const BarycentricRational& r,
                                          const SampleSet& samples) {
  const Index m = samples.z.size();
  std::vector<bool> is_support(static_cast<std::size_t>(m), false);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < r.support_z.size(); ++j) {
      if (samples.z(i) == r.support_z(j)) {
        is_support[static_cast<std::size_t>(i)] = true;
        break;
      }
    }
  }
  return scan_errors(samples, r, is_support);
}

std::pair<BarycentricRational, AaaTrace> aaa_exact(const SampleSet& samples,
                                                   double tol, Index max_degree) {
  validate_greedy_args(samples, tol, max_degree);
  const Index m = samples.z.size();
  const double fnorm = samples.f.cwiseAbs().maxCoeff();

  AaaTrace trace;
  std::vector<Index> support;
  std::vector<bool> is_support(static_cast<std::size_t>(m), false);
  Index next = initial_pick(samples);
  BarycentricRational current;
  BarycentricRational best;
  double best_err = std::numeric_limits<double>::infinity();

  for (Index k = 1; k <= max_degree; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    support.push_back(next);
    is_support[static_cast<std::size_t>(next)] = true;

    ComplexMatrix loewner(m - k, k);
    Index row = 0;
    for (Index i = 0; i < m; ++i) {
      if (is_support[static_cast<std::size_t>(i)]) continue;
      for (Index c = 0; c < k; ++c) {
        const Index j = support[static_cast<std::size_t>(c)];
        loewner(row, c) = (samples.f(i) - samples.f(j)) / (samples.z(i) - samples.z(j));
      }
      ++row;
    }

    Eigen::BDCSVD<ComplexMatrix> backend(loewner, Eigen::ComputeThinV);
    if (backend.info() != Eigen::Success)
      throw SvdConvergenceError("aaa: Loewner SVD failed to converge");
    ComplexVector w = backend.matrixV().col(k - 1);
    normalize_phase(w);
    current = build_rational(samples, support, w);

    auto [max_err, arg] = scan_errors(samples, current, is_support);
    trace.iterations.push_back({k, support.back(), max_err,
                                backend.singularValues()(k - 1), seconds_since(t0)});
    if (max_err < best_err) {
      best_err = max_err;
      best = current;
    }
    if (max_err <= tol * fnorm) {
      trace.converged = true;
      break;
    }
    next = arg;
  }
  return {trace.converged ? current : best, std::move(trace)};
}

std::pair<BarycentricRational, AaaTrace> aaa_sketched(
    const SampleSet& samples, double tol, Index max_degree, std::uint64_t seed,
    const AaaSketchOptions& options) {
  validate_greedy_args(samples, tol, max_degree);
  const Index m = samples.z.size();
  const double fnorm = samples.f.cwiseAbs().maxCoeff();

  Index s = options.sketch_size.value_or(2 * max_degree);
  if (s < max_degree)
    throw std::invalid_argument("aaa: sketch size below max_degree");
  s = std::min(s, m);  // s = m is the exact-embedding test mode
  SketchOperator S = SketchOperator::draw(options.kind, s, m, seed);
  SketchedMatrix sketch{Matrix::zeros(s, 0, ScalarKind::complex), S.id()};

  AaaTrace trace;
  std::vector<Index> support;
  std::vector<bool> is_support(static_cast<std::size_t>(m), false);
  Index next = initial_pick(samples);
  BarycentricRational current;
  BarycentricRational best;
  double best_err = std::numeric_limits<double>::infinity();

  for (Index k = 1; k <= max_degree; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const Index j = next;

    // Row j of the previous Loewner matrix (j was active until now).
    ComplexMatrix old_row(1, k - 1);
    for (Index c = 0; c < k - 1; ++c) {
      const Index jc = support[static_cast<std::size_t>(c)];
      old_row(0, c) = (samples.f(j) - samples.f(jc)) / (samples.z(j) - samples.z(jc));
    }
    support.push_back(j);
    is_support[static_cast<std::size_t>(j)] = true;

    sketch = downdate_row(sketch, S, j, Matrix(std::move(old_row)));
    ComplexVector col = loewner_column(samples, j, is_support);
    sketch = update_column(sketch, S, Matrix(ComplexMatrix(col)), k - 1);

    Eigen::BDCSVD<ComplexMatrix> backend(sketch.data.cplx(), Eigen::ComputeThinV);
    if (backend.info() != Eigen::Success)
      throw SvdConvergenceError("aaa: sketched SVD failed to converge");
    ComplexVector w = backend.matrixV().col(k - 1);
    normalize_phase(w);
    current = build_rational(samples, support, w);

    auto [max_err, arg] = scan_errors(samples, current, is_support);
    AaaIterationRecord record{k, j, max_err, backend.singularValues()(k - 1),
                             seconds_since(t0)};
    if (options.check_consistency) {
      ComplexMatrix embedded = ComplexMatrix::Zero(m, k);
      for (Index c = 0; c < k; ++c) {
        embedded.col(c) = loewner_column(samples, support[static_cast<std::size_t>(c)],
                                         is_support);
      }
      SketchedMatrix fresh = apply(S, Matrix(embedded));
      const double denom = embedded.norm();
      record.consistency_error =
          (fresh.data.cplx() - sketch.data.cplx()).norm() / (denom > 0.0 ? denom : 1.0);
    }
    trace.iterations.push_back(record);

    if (max_err < best_err) {
      best_err = max_err;
      best = current;
    }
    if (max_err <= tol * fnorm) {
      trace.converged = true;
      break;
    }
    next = arg;
  }
  return {trace.converged ? current : best, std::move(trace)};
}

}  // namespace nullsketch
