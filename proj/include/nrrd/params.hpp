#pragma once

#include <cmath>

#include "nrrd/errors.hpp"

namespace nrrd {

// Physical parameters of the two-component reactor model
//
//   du1/dt - lap(u1) = u1*u2 - b*u1        dnu(u1) + alpha*u1            = 0
//   du2/dt - lap(u2) = a*u1                dnu(u2) + beta*|u2|^(g-2)*u2  = 0
//
// u1 is the fast (neutron-like) component, u2 the slow (temperature-like)
// one; the boundary conditions model leakage through the container wall.
struct Params {
  double a = 1.0;      // feedback strength u1 -> u2, a > 0
  double b = 1.0;      // linear absorption of u1, b > 0
  double alpha = 1.0;  // Robin leakage coefficient of u1, alpha >= 0
  double beta = 1.0;   // boundary leakage coefficient of u2, beta > 0
  double gamma = 2.0;  // boundary power law exponent of u2, gamma >= 2

  void validate() const {
    if (!(std::isfinite(a) && a > 0.0)) throw DomainError("params: a must be finite and > 0");
    if (!(std::isfinite(b) && b > 0.0)) throw DomainError("params: b must be finite and > 0");
    if (!(std::isfinite(alpha) && alpha >= 0.0))
      throw DomainError("params: alpha must be finite and >= 0");
    if (!(std::isfinite(beta) && beta > 0.0))
      throw DomainError("params: beta must be finite and > 0");
    if (!(std::isfinite(gamma) && gamma >= 2.0))
      throw DomainError("params: gamma must be finite and >= 2");
  }

  // Parameter regime in which a positive stationary state exists:
  // either a linear boundary law with alpha <= 2*beta, or any
  // superlinear boundary law (gamma > 2).
  bool condition_A_or_B() const {
    return (gamma == 2.0 && alpha <= 2.0 * beta) || gamma > 2.0;
  }
};

// Numerical knobs shared by the solvers. Every solver takes these by value;
// defaults are the tolerances the test suite is calibrated against.
struct SolverOptions {
  double tol_residual = 1e-10;     // stationary system residual target
  int max_iter = 10000;            // cap for fixed-point / eigen iterations
  double relax_omega = 0.5;        // initial Picard relaxation weight
  double newton_tol = 1e-12;       // Newton residual target (scaled by 1+|f|)
  double dt_init = 1e-3;           // first time step
  double dt_min = 1e-12;           // controller gives up below this
  double dt_max = 1e-1;            // controller never exceeds this
  double blowup_threshold = 1e8;   // sup-norm level that counts as blown up
  double decay_threshold = 1e-8;   // sup-norm level that counts as extinct
  int sample_stride = 1;           // record every k-th accepted step

  void validate() const {
    if (!(tol_residual > 0.0)) throw DomainError("options: tol_residual must be > 0");
    if (max_iter < 1) throw DomainError("options: max_iter must be >= 1");
    if (!(relax_omega > 0.0 && relax_omega <= 1.0))
      throw DomainError("options: relax_omega must be in (0, 1]");
    if (!(newton_tol > 0.0)) throw DomainError("options: newton_tol must be > 0");
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
      throw DomainError("options: need 0 < dt_min <= dt_init <= dt_max");
    if (!(blowup_threshold > decay_threshold && decay_threshold > 0.0))
      throw DomainError("options: need blowup_threshold > decay_threshold > 0");
    if (sample_stride < 1) throw DomainError("options: sample_stride must be >= 1");
  }
};

}  // namespace nrrd
