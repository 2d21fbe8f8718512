#include "nullsketch/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace nullsketch {

namespace {

// FFTW's planner mutates global state; executing a plan does not.
std::mutex planner_mutex;

}  // namespace

void idft_unitary_columns(ComplexMatrix& x) {
  const Index m = x.rows(), n = x.cols();
  if (m == 0 || n == 0) return;
  auto* data = reinterpret_cast<fftw_complex*>(x.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    int dims[1] = {static_cast<int>(m)};
    plan = fftw_plan_many_dft(1, dims, static_cast<int>(n), data, nullptr, 1,
                              static_cast<int>(m), data, nullptr, 1,
                              static_cast<int>(m), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("idft_unitary_columns: planner failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  x *= 1.0 / std::sqrt(static_cast<double>(m));
}

void dct3_unitary_columns(RealMatrix& x) {
  const Index m = x.rows(), n = x.cols();
  if (m == 0 || n == 0) return;
  // REDFT01 computes y_j = x_0 + 2 sum_{k>=1} x_k cos(pi k (2j+1) / (2m)).
  // Pre-scaling x_0 by sqrt(1/m) and x_k by sqrt(2/m)/2 makes it C^T x with
  // C the orthonormal DCT-II.
  const double s0 = std::sqrt(1.0 / static_cast<double>(m));
  const double sk = 0.5 * std::sqrt(2.0 / static_cast<double>(m));
  x.row(0) *= s0;
  if (m > 1) x.bottomRows(m - 1) *= sk;

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    int dims[1] = {static_cast<int>(m)};
    fftw_r2r_kind kind[1] = {FFTW_REDFT01};
    plan = fftw_plan_many_r2r(1, dims, static_cast<int>(n), x.data(), nullptr, 1,
                              static_cast<int>(m), x.data(), nullptr, 1,
                              static_cast<int>(m), kind, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("dct3_unitary_columns: planner failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
}

Complex idft_unitary_entry(Index m, Index row, Index j) {
  const double angle = 2.0 * M_PI *
                       static_cast<double>((static_cast<long long>(row) * j) % m) /
                       static_cast<double>(m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  return Complex(scale * std::cos(angle), scale * std::sin(angle));
}

double dct3_unitary_entry(Index m, Index row, Index j) {
  const double cj = (j == 0) ? std::sqrt(1.0 / static_cast<double>(m))
                             : std::sqrt(2.0 / static_cast<double>(m));
  return cj * std::cos(M_PI * static_cast<double>(j) *
                       (2.0 * static_cast<double>(row) + 1.0) /
                       (2.0 * static_cast<double>(m)));
}

}  // namespace nullsketch
