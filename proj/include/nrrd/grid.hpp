#pragma once

#include <memory>
#include <vector>

#include "nrrd/errors.hpp"

namespace nrrd {

// Uniform tensor-product grid on an interval (dim 1) or an axis-aligned
// rectangle (dim 2). Nodes include the boundary; spacing h = (hi-lo)/(n-1).
//
// Quadrature is trapezoidal. `wq` holds the volume weight of every node.
// Boundary integrals use `bweight`, nonzero only on boundary nodes. The
// Robin ghost closure adds `closure[i]` (sum of 2/h over the boundary faces
// meeting node i) times the boundary coefficient to the diagonal of the
// discrete Laplacian; `bweight` is constructed as wq*closure so that the
// discrete operator is self-adjoint in the wq inner product and boundary
// terms pair exactly with boundary quadrature.
struct Grid {
  int dim = 1;
  int nx = 0, ny = 1;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  double hx = 0.0, hy = 0.0;

  std::vector<double> wq;       // volume quadrature weight, all nodes
  std::vector<double> closure;  // Robin ghost closure factor, zero in interior
  std::vector<double> bweight;  // boundary quadrature weight, zero in interior
  std::vector<int> bnodes;      // indices of boundary nodes, ascending

  static Grid interval(double lo, double hi, int n);
  static Grid rectangle(double x_lo, double x_hi, int nx,
                        double y_lo, double y_hi, int ny);

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  int index(int ix, int iy = 0) const { return iy * nx + ix; }
  double x(int ix) const { return x_lo + hx * ix; }
  double y(int iy) const { return dim == 2 ? y_lo + hy * iy : 0.0; }
  bool on_boundary(int idx) const { return closure[idx] != 0.0 || bweight[idx] != 0.0; }

  double measure() const {
    return dim == 1 ? (x_hi - x_lo) : (x_hi - x_lo) * (y_hi - y_lo);
  }
  double boundary_measure() const {
    return dim == 1 ? 2.0 : 2.0 * ((x_hi - x_lo) + (y_hi - y_lo));
  }

  bool same_layout(const Grid& o) const {
    return dim == o.dim && nx == o.nx && ny == o.ny && x_lo == o.x_lo &&
           x_hi == o.x_hi && y_lo == o.y_lo && y_hi == o.y_hi;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_interval(double lo, double hi, int n);
GridPtr make_rectangle(double x_lo, double x_hi, int nx,
                       double y_lo, double y_hi, int ny);

}  // namespace nrrd
