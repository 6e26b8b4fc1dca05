#pragma once

#include <vector>

namespace nrrd {

// One recorded sample of an evolution run. The weighted functionals use the
// L1-normalized positive eigenfunction phi1 of the Robin Laplacian (with the
// run's alpha):
//   mass_u1  = integral of u1*phi1 over the domain
//   mass_u2  = integral of u2*phi1
//   bnd_u2   = boundary integral of u2*phi1
//   bnd_u2_gamma = boundary integral of u2^gamma * phi1
//   mass_u1u2    = integral of u1*u2*phi1
// dt is the step size that produced this sample (0 for the initial row).
struct SeriesRow {
  double t = 0.0;
  double linf_u1 = 0.0;
  double linf_u2 = 0.0;
  double mass_u1 = 0.0;
  double mass_u2 = 0.0;
  double bnd_u2 = 0.0;
  double bnd_u2_gamma = 0.0;
  double mass_u1u2 = 0.0;
  double dt = 0.0;
};

struct TimeSeries {
  std::vector<SeriesRow> rows;

  std::size_t size() const { return rows.size(); }
  const SeriesRow& operator[](std::size_t i) const { return rows[i]; }
};

}  // namespace nrrd
