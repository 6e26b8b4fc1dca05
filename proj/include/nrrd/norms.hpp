#pragma once

#include "nrrd/field.hpp"

namespace nrrd {

// Sup norm over the nodes. Rejects non-finite data.
double linf_norm(const Field& f);

// Discrete L2 norm: sqrt of the trapezoidal integral of f^2.
double l2_norm(const Field& f);

// Discrete H1 seminorm: gradient by centered differences in the interior
// and second-order one-sided differences at the boundary, L2-integrated.
double h1_seminorm(const Field& f);

}  // namespace nrrd
