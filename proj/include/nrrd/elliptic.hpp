#pragma once

#include "nrrd/field.hpp"
#include "nrrd/params.hpp"

namespace nrrd {

// Solve  -lap(v) + c*v = f  with  dnu(v) + alpha*v = 0.
// c = alpha = 0 requires a zero-mean f (otherwise SolvabilityError); the
// returned representative then has zero weighted mean.
Field solve_linear_robin(GridPtr grid, double c, double alpha, const Field& f,
                         const SolverOptions& opt = {});

// Solve  -lap(v) = f  with  dnu(v) + beta*|v|^(gamma-2)*v = 0  for f >= 0,
// by damped Newton started from the gamma = 2 linearization. Negative
// iterate values are clipped to zero before fractional powers are taken.
// If residual_history is given, the sup-norm residual after every Newton
// step is appended (for convergence-order diagnostics).
Field solve_poisson_nonlinear_bc(GridPtr grid, double beta, double gamma,
                                 const Field& f, const SolverOptions& opt = {},
                                 std::vector<double>* residual_history = nullptr);

// One sweep of the stationary fixed-point map: given u = (u1, u2), return
// (v1, v2) where
//   -lap(v1) + b*v1 = u1*u2,   dnu(v1) + alpha*v1 = 0,
//   -lap(v2)        = a*u1,    dnu(v2) + beta*|v2|^(gamma-2)*v2 = 0.
// Fixed points are exactly the stationary states; the map sends 0 to 0 and
// is componentwise monotone on nonnegative inputs.
StatePair psi_map(const StatePair& u, const Params& p, const SolverOptions& opt = {});

}  // namespace nrrd
