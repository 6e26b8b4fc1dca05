#include "nrrd/norms.hpp"

#include <algorithm>
#include <cmath>

namespace nrrd {

double linf_norm(const Field& f) {
  check_finite(f, "linf_norm");
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const Field& f) {
  check_finite(f, "l2_norm");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.grid->wq[i] * f.v[i] * f.v[i];
  return std::sqrt(s);
}

namespace {

// d/ds along one axis: centered in the interior, second-order one-sided at
// the two ends. `at(k)` indexes the k-th node along the axis.
template <class At>
double axis_derivative(const At& at, int i, int n, double h) {
  if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (i == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

}  // namespace

double h1_seminorm(const Field& f) {
  check_finite(f, "h1_seminorm");
  const Grid& g = *f.grid;
  double s = 0.0;
  if (g.dim == 1) {
    const auto at = [&](int k) { return f.v[k]; };
    for (int i = 0; i < g.nx; ++i) {
      const double dx = axis_derivative(at, i, g.nx, g.hx);
      s += g.wq[i] * dx * dx;
    }
  } else {
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const auto row = [&](int k) { return f.v[g.index(k, iy)]; };
        const auto col = [&](int k) { return f.v[g.index(ix, k)]; };
        const double dx = axis_derivative(row, ix, g.nx, g.hx);
        const double dy = axis_derivative(col, iy, g.ny, g.hy);
        s += g.wq[g.index(ix, iy)] * (dx * dx + dy * dy);
      }
  }
  return std::sqrt(s);
}

}  // namespace nrrd
