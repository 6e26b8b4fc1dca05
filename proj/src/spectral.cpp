#include "nrrd/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "nrrd/norms.hpp"
#include "nrrd/operators.hpp"

namespace nrrd {

namespace {

void normalize(Field& phi, EigenNorm norm) {
  double scale;
  if (norm == EigenNorm::l2_unit) {
    scale = l2_norm(phi);
  } else {
    scale = integrate(phi);
  }
  if (!(scale > 0.0)) throw ConvergenceError("eigenpair: degenerate normalization");
  for (double& x : phi.v) x /= scale;
}

}  // namespace

EigenPair robin_eigenpair(GridPtr grid, double alpha, EigenNorm norm,
                          const SolverOptions& opt, double shift,
                          const Field* start) {
  if (!(std::isfinite(alpha) && alpha >= 0.0))
    throw DomainError("eigenpair: alpha must be finite and >= 0");
  opt.validate();

  if (alpha == 0.0) {
    // Pure Neumann: the discrete operator annihilates constants exactly.
    Field phi(grid, 1.0);
    normalize(phi, norm);
    return {0.0, std::move(phi)};
  }

  EllipticOperator a(grid, 1.0);
  for (std::size_t i = 0; i < a.d.size(); ++i) a.d[i] = alpha * grid->closure[i];

  EllipticOperator a_shifted = a;
  if (shift != 0.0)
    for (double& di : a_shifted.d) di -= shift;

  Field phi = start ? *start : Field(grid, 1.0);
  check_finite(phi, "eigenpair start");
  normalize(phi, EigenNorm::l2_unit);

  const std::size_t n = grid->size();
  std::vector<double> ax(n);
  double lambda = 0.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    phi.v = a_shifted.solve(phi.v, 1e-12, 100 * static_cast<int>(n));
    normalize(phi, EigenNorm::l2_unit);

    a.apply(phi.v, ax);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += grid->wq[i] * ax[i] * phi.v[i];
      den += grid->wq[i] * phi.v[i] * phi.v[i];
    }
    lambda = num / den;

    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      res = std::max(res, std::abs(ax[i] - lambda * phi.v[i]));
    if (res <= 1e-8 * (1.0 + std::abs(lambda))) {
      if (integrate(phi) < 0.0)
        for (double& x : phi.v) x = -x;
      if (*std::min_element(phi.v.begin(), phi.v.end()) <= 0.0)
        throw ConvergenceError("eigenpair: iteration lost positivity");
      normalize(phi, norm);
      return {lambda, std::move(phi)};
    }
  }
  throw ConvergenceError("eigenpair: residual tolerance not reached within max_iter");
}

double hopf_floor(const Field& phi) {
  check_finite(phi, "hopf_floor");
  const double m = *std::min_element(phi.v.begin(), phi.v.end());
  if (!(m > 0.0)) throw DomainError("hopf_floor: eigenfunction is not strictly positive");
  return m;
}

}  // namespace nrrd
