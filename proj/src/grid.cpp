#include "nrrd/grid.hpp"

#include <cmath>

namespace nrrd {

namespace {

void check_axis(double lo, double hi, int n, const char* name) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo))
    throw DomainError(std::string("grid: ") + name + " extent must satisfy hi > lo");
  if (n < 3) throw DomainError(std::string("grid: ") + name + " needs at least 3 nodes");
}

// 1D trapezoid weights: h/2 at the ends, h inside.
std::vector<double> trapezoid(double h, int n) {
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

}  // namespace

Grid Grid::interval(double lo, double hi, int n) {
  check_axis(lo, hi, n, "x");
  Grid g;
  g.dim = 1;
  g.nx = n;
  g.ny = 1;
  g.x_lo = lo;
  g.x_hi = hi;
  g.hx = (hi - lo) / (n - 1);
  g.hy = 0.0;
  g.wq = trapezoid(g.hx, n);
  g.closure.assign(n, 0.0);
  g.closure[0] = g.closure[n - 1] = 2.0 / g.hx;
  g.bweight.assign(n, 0.0);
  g.bnodes = {0, n - 1};
  for (int i : g.bnodes) g.bweight[i] = g.wq[i] * g.closure[i];
  return g;
}

Grid Grid::rectangle(double x_lo, double x_hi, int nx,
                     double y_lo, double y_hi, int ny) {
  check_axis(x_lo, x_hi, nx, "x");
  check_axis(y_lo, y_hi, ny, "y");
  Grid g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.y_lo = y_lo;
  g.y_hi = y_hi;
  g.hx = (x_hi - x_lo) / (nx - 1);
  g.hy = (y_hi - y_lo) / (ny - 1);

  const std::vector<double> wx = trapezoid(g.hx, nx);
  const std::vector<double> wy = trapezoid(g.hy, ny);
  g.wq.resize(g.size());
  g.closure.assign(g.size(), 0.0);
  g.bweight.assign(g.size(), 0.0);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int idx = g.index(ix, iy);
      g.wq[idx] = wx[ix] * wy[iy];
      double c = 0.0;
      if (ix == 0 || ix == nx - 1) c += 2.0 / g.hx;
      if (iy == 0 || iy == ny - 1) c += 2.0 / g.hy;
      if (c != 0.0) {
        g.closure[idx] = c;
        g.bweight[idx] = g.wq[idx] * c;
        g.bnodes.push_back(idx);
      }
    }
  return g;
}

GridPtr make_interval(double lo, double hi, int n) {
  return std::make_shared<Grid>(Grid::interval(lo, hi, n));
}

GridPtr make_rectangle(double x_lo, double x_hi, int nx,
                       double y_lo, double y_hi, int ny) {
  return std::make_shared<Grid>(Grid::rectangle(x_lo, x_hi, nx, y_lo, y_hi, ny));
}

}  // namespace nrrd
