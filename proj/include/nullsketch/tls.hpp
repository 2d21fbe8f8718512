#pragma once

#include <optional>
#include <stdexcept>

#include "nullsketch/kernels.hpp"
#include "nullsketch/matrix.hpp"
#include "nullsketch/sketch.hpp"

namespace nullsketch {

// Total least squares min ||[E|R]||_F subject to B + R in range(A + E),
// solved through the trailing right singular subspace of [A|B].
struct TlsProblem {
  Matrix A;  // m x n
  Matrix B;  // m x k, with m >= n + k and n >= k
};

struct TlsSolution {
  Matrix X;                           // n x k, X = -V_k1 V_k2^{-1}
  SubspaceBasis Vk;                   // (n+k) x k trailing subspace of [A|B]
  double tls_residual = 0.0;          // sqrt(sum of the k trailing sigma^2)
  double cond_Vk2 = 0.0;              // condition estimate of V_k2
  RealVector augmented_singular_values;          // full spectrum behind Vk
  std::optional<double> residual_certificate;    // ||[A|B] Vk||_F when requested
};

struct TlsOptions {
  // The solvability check sigma_n(A) > sigma_{n+1}([A|B]) throws when it
  // fails; at high noise it can sit right at the margin, and benches opt out.
  bool allow_marginal = false;
  // Exact ||[A|B] Vk||_F pass (one O(m(n+k)k) product). For the sketched
  // solver this turns the estimated residual into a certified one.
  bool certificate = false;
  double cond_limit = 1e12;
};

class TlsExistenceError : public std::runtime_error {
 public:
  TlsExistenceError(double sigma_n_a, double sigma_trailing);
  double sigma_n_A() const { return sigma_n_a_; }
  double sigma_trailing() const { return sigma_trailing_; }

 private:
  double sigma_n_a_;
  double sigma_trailing_;
};

class TlsConditionError : public std::runtime_error {
 public:
  explicit TlsConditionError(double cond);
  double cond() const { return cond_; }

 private:
  double cond_;
};

// Dense solver: thin QR of [A|B] first, then SVDs of the small triangular
// factor (which also yields sigma_n(A) for the solvability check).
TlsSolution tls_solve_exact(const TlsProblem& p, const TlsOptions& options = {});

// Sketched solver: the trailing subspace comes from S [A|B]; the solvability
// check and the reported residual use sketched singular values.
TlsSolution tls_solve_sketched(const TlsProblem& p, const SketchOperator& S,
                               const TlsOptions& options = {});

struct TlsErrorMetrics {
  double rel_err = 0.0;  // ||X - Xs||_2 / ||X||_2
  double sin_X = 0.0;    // spectral sin between the column spans of X and Xs
  double sin_Vk = 0.0;   // spectral sin between the trailing subspaces
};

TlsErrorMetrics tls_error_metrics(const TlsSolution& exact, const TlsSolution& sk);

}  // namespace nullsketch
