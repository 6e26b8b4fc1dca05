#pragma once

#include <vector>

#include "nrrd/field.hpp"
#include "nrrd/linalg.hpp"

namespace nrrd {

// Discretization of  A = diag(d) + s * (-lap_h)  on a tensor grid.
//
// -lap_h is the standard 3/5-point stencil closed at the boundary by a
// ghost node eliminated through the centered flux relation
//   u_ghost = u_inner - 2*h*alpha*u_boundary,
// which turns a Robin coefficient alpha into the diagonal contribution
// alpha * Grid::closure. Callers fold every zeroth-order term (mass shifts,
// Robin terms, frozen reaction coefficients) into d, so this one type
// covers the stationary solves, the eigeniteration, and the time steps.
//
// The operator is self-adjoint and (for d >= 0, not all zero) positive
// definite in the Grid::wq inner product.
struct EllipticOperator {
  GridPtr grid;
  double s = 1.0;
  std::vector<double> d;

  EllipticOperator(GridPtr g, double scale)
      : grid(std::move(g)), s(scale), d(grid->size(), 0.0) {}

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> diagonal() const;

  // Enumerate the row entries of the full operator: f(col, coeff).
  template <class F>
  void row(int idx, F&& f) const {
    const Grid& g = *grid;
    const int ix = idx % g.nx;
    const int iy = idx / g.nx;
    double diag = d[idx];
    const double cx = s / (g.hx * g.hx);
    if (ix == 0) {
      diag += 2.0 * cx;
      f(idx + 1, -2.0 * cx);
    } else if (ix == g.nx - 1) {
      diag += 2.0 * cx;
      f(idx - 1, -2.0 * cx);
    } else {
      diag += 2.0 * cx;
      f(idx - 1, -cx);
      f(idx + 1, -cx);
    }
    if (g.dim == 2) {
      const double cy = s / (g.hy * g.hy);
      if (iy == 0) {
        diag += 2.0 * cy;
        f(idx + g.nx, -2.0 * cy);
      } else if (iy == g.ny - 1) {
        diag += 2.0 * cy;
        f(idx - g.nx, -2.0 * cy);
      } else {
        diag += 2.0 * cy;
        f(idx - g.nx, -cy);
        f(idx + g.nx, -cy);
      }
    }
    f(idx, diag);
  }

  // Direct banded solve in 1D, Jacobi-PCG in 2D. tol_abs is the sup-norm
  // residual target for the iterative path.
  std::vector<double> solve(const std::vector<double>& b, double tol_abs,
                            int max_iter) const;
};

}  // namespace nrrd
