#pragma once

#include <cstddef>
#include <vector>

#include "nrrd/errors.hpp"

namespace nrrd {

// General banded matrix with kl sub- and ku super-diagonals, LAPACK band
// storage with kl extra fill rows so the factorization can pivot. Entry
// (i, j) lives at ab[(kl + ku + i - j) + j*ldab].
class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
        ab_(static_cast<std::size_t>(ldab_) * n, 0.0) {}

  int size() const { return n_; }

  double& at(int i, int j) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
      throw DomainError("band matrix: entry outside the band");
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
  }

  // LU factorization with partial pivoting, in place. Throws
  // SolvabilityError on an exactly singular pivot.
  void factor();

  // Solve with the factored matrix; b is overwritten by the solution.
  void solve(std::vector<double>& b) const;

 private:
  int n_, kl_, ku_, ldab_;
  bool factored_ = false;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

// Preconditioned conjugate gradients for operators that are self-adjoint
// and positive definite in the weighted inner product <u,v> = sum w*u*v.
// `apply` computes y = A x; `diag` is the operator diagonal used as Jacobi
// preconditioner. Iterates until the sup norm of the residual drops below
// tol_abs, returns the iteration count. Throws ConvergenceError at the cap.
template <class Apply>
int pcg_solve(const Apply& apply, const std::vector<double>& diag,
              const std::vector<double>& weight, const std::vector<double>& b,
              std::vector<double>& x, double tol_abs, int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  if (x.size() != n) x.assign(n, 0.0);

  const auto wdot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += weight[i] * u[i] * v[i];
    return s;
  };
  const auto sup = [&](const std::vector<double>& u) {
    double m = 0.0;
    for (double t : u) m = std::max(m, std::abs(t));
    return m;
  };

  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (sup(r) <= tol_abs) return 0;

  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  double rho = wdot(r, z);
  p = z;

  for (int it = 1; it <= max_iter; ++it) {
    apply(p, q);
    const double pq = wdot(p, q);
    if (!(pq > 0.0))
      throw SolvabilityError("pcg: operator not positive definite on search direction");
    const double alpha = rho / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (sup(r) <= tol_abs) return it;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rho_new = wdot(r, z);
    const double beta = rho_new / rho;
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw ConvergenceError("pcg: residual tolerance not reached within iteration cap");
}

}  // namespace nrrd
