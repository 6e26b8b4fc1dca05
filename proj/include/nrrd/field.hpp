#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "nrrd/grid.hpp"

namespace nrrd {

// Nodal scalar field on a grid. Value semantics; solver routines treat
// inputs as immutable and return fresh fields.
struct Field {
  GridPtr grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), v(grid->size(), fill) {}

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  // Fill from a function of the node coordinates.
  static Field sample(GridPtr g, const std::function<double(double, double)>& f) {
    Field out(g);
    for (int iy = 0; iy < g->ny; ++iy)
      for (int ix = 0; ix < g->nx; ++ix)
        out.v[g->index(ix, iy)] = f(g->x(ix), g->y(iy));
    return out;
  }
};

inline void check_same_grid(const Field& a, const Field& b, const char* where) {
  if (!a.grid || !b.grid || !a.grid->same_layout(*b.grid))
    throw StateError(std::string(where) + ": fields live on different grids");
}

inline void check_finite(const Field& f, const char* where) {
  for (double x : f.v)
    if (!std::isfinite(x)) throw DomainError(std::string(where) + ": non-finite field value");
}

// Trapezoidal volume integral of f over the domain.
inline double integrate(const Field& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.grid->wq[i] * f.v[i];
  return s;
}

// Trapezoidal integral of f over the boundary.
inline double integrate_boundary(const Field& f) {
  double s = 0.0;
  for (int i : f.grid->bnodes) s += f.grid->bweight[i] * f.v[i];
  return s;
}

// Pair of components advancing together in time.
struct StatePair {
  Field u1;
  Field u2;
  double t = 0.0;

  StatePair() = default;
  StatePair(Field a, Field c, double time = 0.0)
      : u1(std::move(a)), u2(std::move(c)), t(time) {
    check_same_grid(u1, u2, "state");
  }

  const GridPtr& grid() const { return u1.grid; }
};

}  // namespace nrrd
