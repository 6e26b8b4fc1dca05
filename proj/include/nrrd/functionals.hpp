#pragma once

#include "nrrd/field.hpp"
#include "nrrd/params.hpp"
#include "nrrd/series.hpp"

namespace nrrd {

// integral of f*phi1 over the domain (trapezoid weights)
double weighted_mass(const Field& f, const Field& phi1);

// boundary integral of f^p * phi1; requires p >= 1 and f >= 0 on the boundary
double weighted_boundary(const Field& f, double p, const Field& phi1);

// Scalar bracket functional used by the blow-up threshold argument:
//   g(s) = beta*s^gamma - beta*s0*s^(gamma-1) - (alpha/2)*s^2 + alpha*s0*s
// over s >= 0, where s0 = shift > 0.  Its infimum is finite exactly when
// gamma > 2, or gamma == 2 with alpha <= 2*beta.
struct BracketParams {
  double beta = 1.0;
  double gamma = 2.0;
  double alpha = 0.0;
  double shift = 1.0;

  void validate() const;
};

struct BracketResult {
  bool finite = true;
  double value = 0.0;   // -infinity when !finite
  double argmin = 0.0;  // meaningful only when finite
};

BracketResult bracket_infimum(const BracketParams& bp);

// Residual of the weighted-mass balance laws along a uniformly sampled run.
// With m1 = mass_u1, m2 = mass_u2 and lambda1 the principal Robin eigenvalue:
//   u1:  d/dt m1 + (b + lambda1) m1 = mass_u1u2
//   u2 (gamma == 2 only):  d/dt m2 + lambda1 m2 + (beta - alpha) bnd_u2 = a m1
// Time derivatives are centered differences; endpoints are excluded; the
// samples must be uniformly spaced.  Returns the max absolute defect.
double mass_balance_residual_u1(const TimeSeries& s, const Params& p,
                                double lambda1);
double mass_balance_residual_u2(const TimeSeries& s, const Params& p,
                                double lambda1);

}  // namespace nrrd
