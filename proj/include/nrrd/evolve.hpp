#pragma once

#include <optional>
#include <vector>

#include "nrrd/field.hpp"
#include "nrrd/params.hpp"
#include "nrrd/series.hpp"

namespace nrrd {

// Time integration of the reactor system
//
//   du1/dt - lap(u1) = u1*u2 - b*u1
//   du2/dt - lap(u2) = a*u1
//
// by backward Euler with the u1 reaction coefficient frozen at the current
// u2 (optionally clamped to [-M, M]). Diffusion and absorption are implicit,
// so every linear system is an M-matrix and nonnegativity is inherited from
// the initial data step by step.

enum class OutcomeKind { Decayed, ConvergedToSteady, BlowUp, Inconclusive };

struct RunOutcome {
  OutcomeKind kind = OutcomeKind::Inconclusive;
  double t_final = 0.0;
  std::optional<double> blowup_estimate;  // set when kind == BlowUp
  double peak_linf_u1 = 0.0;
  double peak_linf_u2 = 0.0;
};

// Nodewise clamp to [-M, M].
Field apply_cutoff(const Field& f, double M);

// One backward-Euler step of length dt. cutoff_M > 0 clamps the frozen
// reaction coefficient (the current u2) to [-M, M] first; 0 disables the
// clamp. Inner solver failures surface as StepError carrying dt.
StatePair step(const StatePair& state, double dt, const Params& p,
               const SolverOptions& opt, double cutoff_M = 0.0);

struct EvolveResult {
  RunOutcome outcome;
  TimeSeries series;
  std::vector<StatePair> states;  // sampled snapshots when record_states set
  StatePair final_state;
  double lambda1 = 0.0;  // principal Robin eigenvalue used by the series
  Field phi1;            // its L1-normalized eigenfunction
};

// Adaptive-dt integration from state0 up to t_end: halve dt on StepError or
// on per-step sup-norm growth above 20%, double after 10 calm steps (capped
// at dt_max), classify the run per RunOutcome. Never throws on dynamics;
// Inconclusive is the fallback.
EvolveResult evolve(const StatePair& state0, double t_end, const Params& p,
                    const SolverOptions& opt, double cutoff_M = 0.0,
                    bool record_states = false);

struct ComparisonReport {
  bool ok = true;
  std::size_t compared = 0;      // snapshots at shared sample times
  long first_violation = -1;     // index into the shared-sample sequence
  double max_excess = 0.0;       // max nodewise (A - B) seen (<= slack if ok)
};

// Checks the discrete comparison principle between two recorded runs with
// nodewise-ordered initial data (A <= B): at every shared sample time the
// order must persist up to slack 1e-8*(1 + peak norm of B).
ComparisonReport comparison_check(const EvolveResult& a, const EvolveResult& b);

}  // namespace nrrd
