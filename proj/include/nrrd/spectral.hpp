#pragma once

#include "nrrd/field.hpp"
#include "nrrd/params.hpp"

namespace nrrd {

// Ground eigenpair of the Robin Laplacian:
//   -lap(phi) = lambda*phi,   dnu(phi) + alpha*phi = 0.
// phi is strictly positive on the closed domain; lambda = 0 exactly when
// alpha = 0 (constant mode).
struct EigenPair {
  double lambda = 0.0;
  Field phi;
};

enum class EigenNorm { l2_unit, l1_unit };

// Shifted inverse power iteration on the discrete operator, deterministic
// start vector = 1 (or `start` if given, for robustness experiments).
// Converges when ||A*phi - lambda*phi||_inf <= 1e-8 * (1 + lambda).
EigenPair robin_eigenpair(GridPtr grid, double alpha,
                          EigenNorm norm = EigenNorm::l2_unit,
                          const SolverOptions& opt = {}, double shift = 0.0,
                          const Field* start = nullptr);

// Minimum nodal value of a positive eigenfunction (quantitative positivity
// floor used by the threshold experiments).
double hopf_floor(const Field& phi);

}  // namespace nrrd
