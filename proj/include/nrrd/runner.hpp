#pragma once

#include "nrrd/config.hpp"

namespace nrrd {

// Executes one configured run and writes its artifacts into cfg.outdir:
// series.csv, report.txt, final.ckpt, plot_norms.svg, plot_profiles.svg
// (plots are best-effort), plus sweep.csv for the sweep command.
//
// Returns the process exit code:
//   0  success
//   3  run ended in finite-time blow-up (informational)
//   4  a verification check failed
//   5  solver or i/o error (message on stderr)
int run(const RunConfig& cfg);

}  // namespace nrrd
