#include "nrrd/operators.hpp"

namespace nrrd {

void EllipticOperator::apply(const std::vector<double>& x,
                             std::vector<double>& y) const {
  const Grid& g = *grid;
  y.assign(g.size(), 0.0);
  const double cx = s / (g.hx * g.hx);
  for (int iy = 0; iy < g.ny; ++iy) {
    const int off = iy * g.nx;
    y[off] += 2.0 * cx * (x[off] - x[off + 1]);
    for (int ix = 1; ix < g.nx - 1; ++ix)
      y[off + ix] += cx * (2.0 * x[off + ix] - x[off + ix - 1] - x[off + ix + 1]);
    y[off + g.nx - 1] += 2.0 * cx * (x[off + g.nx - 1] - x[off + g.nx - 2]);
  }
  if (g.dim == 2) {
    const double cy = s / (g.hy * g.hy);
    for (int ix = 0; ix < g.nx; ++ix) {
      y[ix] += 2.0 * cy * (x[ix] - x[ix + g.nx]);
      y[(g.ny - 1) * g.nx + ix] +=
          2.0 * cy * (x[(g.ny - 1) * g.nx + ix] - x[(g.ny - 2) * g.nx + ix]);
    }
    for (int iy = 1; iy < g.ny - 1; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const int idx = iy * g.nx + ix;
        y[idx] += cy * (2.0 * x[idx] - x[idx - g.nx] - x[idx + g.nx]);
      }
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += d[i] * x[i];
}

std::vector<double> EllipticOperator::diagonal() const {
  const Grid& g = *grid;
  std::vector<double> diag(g.size());
  double base = 2.0 * s / (g.hx * g.hx);
  if (g.dim == 2) base += 2.0 * s / (g.hy * g.hy);
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = base + d[i];
  return diag;
}

std::vector<double> EllipticOperator::solve(const std::vector<double>& b,
                                            double tol_abs, int max_iter) const {
  const Grid& g = *grid;
  if (g.dim == 1) {
    BandMatrix m(g.nx, 1, 1);
    for (int i = 0; i < g.nx; ++i)
      row(i, [&](int j, double c) { m.at(i, j) += c; });
    m.factor();
    std::vector<double> x = b;
    m.solve(x);
    return x;
  }
  std::vector<double> x(g.size(), 0.0);
  pcg_solve([this](const std::vector<double>& p, std::vector<double>& q) { apply(p, q); },
            diagonal(), g.wq, b, x, tol_abs, max_iter);
  return x;
}

}  // namespace nrrd
