#include "nrrd/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nrrd/checkpoint.hpp"
#include "nrrd/csvio.hpp"
#include "nrrd/elliptic.hpp"
#include "nrrd/errors.hpp"
#include "nrrd/evolve.hpp"
#include "nrrd/experiments.hpp"
#include "nrrd/expr.hpp"
#include "nrrd/functionals.hpp"
#include "nrrd/norms.hpp"
#include "nrrd/spectral.hpp"
#include "nrrd/svg.hpp"

namespace nrrd {

namespace {

const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Decayed: return "Decayed";
    case OutcomeKind::ConvergedToSteady: return "ConvergedToSteady";
    case OutcomeKind::BlowUp: return "BlowUp";
    case OutcomeKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* yesno(bool b) { return b ? "yes" : "no"; }

std::string kvd(const std::string& key, double v) {
  return key + " = " + format_double(v) + "\n";
}

std::string run_header(const RunConfig& cfg) {
  std::ostringstream out;
  out << "command = " << command_name(cfg.command) << "\n"
      << "dim = " << cfg.grid.dim << "\n"
      << "nx = " << cfg.grid.nx << "\n";
  if (cfg.grid.dim == 2) out << "ny = " << cfg.grid.ny << "\n";
  out << kvd("a", cfg.params.a) << kvd("b", cfg.params.b)
      << kvd("alpha", cfg.params.alpha) << kvd("beta", cfg.params.beta)
      << kvd("gamma", cfg.params.gamma);
  return out.str();
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw FormatError("write to '" + path + "' failed");
}

// Standard artifact set; the plots are best-effort (a warning, not an error).
void write_artifacts(const std::string& outdir, const std::string& report,
                     const TimeSeries& series, const StatePair& final_state) {
  write_series_csv(outdir + "/series.csv", series);
  write_text(outdir + "/report.txt", report);
  save_checkpoint(final_state, outdir + "/final.ckpt");
  try {
    write_norm_plot(outdir + "/plot_norms.svg", series);
  } catch (const Error& e) {
    std::cerr << "warning: norm plot skipped: " << e.what() << "\n";
  }
  try {
    write_profile_plot(outdir + "/plot_profiles.svg", final_state);
  } catch (const Error& e) {
    std::cerr << "warning: profile plot skipped: " << e.what() << "\n";
  }
}

// Series row for a standalone state (used by the eig command).
SeriesRow state_row(const StatePair& s, const Field& phi1_l1, double gamma) {
  SeriesRow row;
  row.t = s.t;
  row.linf_u1 = linf_norm(s.u1);
  row.linf_u2 = linf_norm(s.u2);
  row.mass_u1 = weighted_mass(s.u1, phi1_l1);
  row.mass_u2 = weighted_mass(s.u2, phi1_l1);
  row.bnd_u2 = weighted_boundary(s.u2, 1.0, phi1_l1);
  row.bnd_u2_gamma = weighted_boundary(s.u2, gamma, phi1_l1);
  Field prod(s.grid());
  for (std::size_t i = 0; i < prod.size(); ++i) prod.v[i] = s.u1.v[i] * s.u2.v[i];
  row.mass_u1u2 = weighted_mass(prod, phi1_l1);
  row.dt = 0.0;
  return row;
}

StatePair build_initial_state(const RunConfig& cfg, const GridPtr& grid) {
  switch (cfg.initial.kind) {
    case InitialKind::zero:
      return StatePair(Field(grid), Field(grid), 0.0);
    case InitialKind::scaled_steady: {
      SteadyResult steady =
          find_steady_robust(grid, cfg.params, cfg.solver, cfg.seed_scale);
      StatePair s = steady.state;
      for (double& x : s.u1.v) x *= cfg.l1;
      for (double& x : s.u2.v) x *= cfg.l2;
      s.t = 0.0;
      return s;
    }
    case InitialKind::file:
      return load_checkpoint_on(grid, cfg.initial.path);
    case InitialKind::expression: {
      const Expr e1 = parse_expression(cfg.initial.expr_u1);
      const Expr e2 = parse_expression(cfg.initial.expr_u2);
      return StatePair(Field::sample(grid, e1), Field::sample(grid, e2), 0.0);
    }
  }
  throw StateError("initial state: unknown kind");
}

int run_eig(const RunConfig& cfg, const GridPtr& grid) {
  const EigenPair eig =
      robin_eigenpair(grid, cfg.params.alpha, EigenNorm::l2_unit, cfg.solver);
  const double floor = hopf_floor(eig.phi);

  Field phi_l1 = eig.phi;
  const double total = integrate(phi_l1);
  for (double& x : phi_l1.v) x /= total;

  const StatePair state(eig.phi, eig.phi, 0.0);
  TimeSeries series;
  series.rows.push_back(state_row(state, phi_l1, cfg.params.gamma));

  std::string report = run_header(cfg);
  report += kvd("lambda1", eig.lambda);
  report += kvd("hopf_floor", floor);
  write_artifacts(cfg.outdir, report, series, state);
  std::cout << "lambda1 = " << format_double(eig.lambda) << "\n";
  return 0;
}

int run_steady(const RunConfig& cfg, const GridPtr& grid) {
  const SteadyResult steady =
      find_steady_robust(grid, cfg.params, cfg.solver, cfg.seed_scale);

  // consistency: the state must also be a fixed point of the elliptic map
  const StatePair image = psi_map(steady.state, cfg.params, cfg.solver);
  double fp_res = 0.0;
  for (std::size_t i = 0; i < image.u1.size(); ++i) {
    fp_res = std::max(fp_res, std::abs(image.u1.v[i] - steady.state.u1.v[i]));
    fp_res = std::max(fp_res, std::abs(image.u2.v[i] - steady.state.u2.v[i]));
  }
  const bool fp_ok = fp_res <= 10.0 * cfg.solver.tol_residual;

  const Field phi1 =
      robin_eigenpair(grid, cfg.params.alpha, EigenNorm::l1_unit, cfg.solver)
          .phi;
  TimeSeries series;
  series.rows.push_back(state_row(steady.state, phi1, cfg.params.gamma));

  std::string report = run_header(cfg);
  report += std::string("classification = ") +
            (steady.classification == SteadyClass::positive ? "positive"
             : steady.classification == SteadyClass::trivial_zero
                 ? "trivial_zero"
                 : "failed") +
            "\n";
  report += kvd("residual", steady.residual);
  report += "iterations = " + std::to_string(steady.iterations) + "\n";
  report += std::string("method = ") +
            (steady.method == SteadyMethod::picard ? "picard"
                                                   : "picard_then_newton") +
            "\n";
  report += kvd("fixed_point_residual", fp_res);
  report += std::string("fixed_point_ok = ") + yesno(fp_ok) + "\n";
  write_artifacts(cfg.outdir, report, series, steady.state);

  const bool ok = steady.classification == SteadyClass::positive && fp_ok;
  std::cout << "steady: " << (ok ? "PASS" : "FAIL")
            << " (residual = " << format_double(steady.residual) << ")\n";
  return ok ? 0 : 4;
}

int run_evolve(const RunConfig& cfg, const GridPtr& grid) {
  const StatePair state0 = build_initial_state(cfg, grid);
  const EvolveResult run =
      evolve(state0, cfg.t_end, cfg.params, cfg.solver, cfg.cutoff_m, false);

  std::string report = run_header(cfg);
  report += std::string("initial = ") + initial_kind_name(cfg.initial.kind) + "\n";
  report += std::string("outcome = ") + outcome_name(run.outcome.kind) + "\n";
  report += kvd("t_final", run.outcome.t_final);
  report += kvd("peak_linf_u1", run.outcome.peak_linf_u1);
  report += kvd("peak_linf_u2", run.outcome.peak_linf_u2);
  report += kvd("lambda1", run.lambda1);
  if (run.outcome.blowup_estimate)
    report += kvd("blowup_estimate", *run.outcome.blowup_estimate);

  try {
    report += kvd("mass_balance_u1",
                  mass_balance_residual_u1(run.series, cfg.params, run.lambda1));
  } catch (const DomainError&) {
    report += "mass_balance_u1 = n/a\n";
  }
  if (cfg.params.gamma == 2.0) {
    try {
      report += kvd("mass_balance_u2", mass_balance_residual_u2(
                                           run.series, cfg.params, run.lambda1));
    } catch (const DomainError&) {
      report += "mass_balance_u2 = n/a\n";
    }
  } else {
    report += "mass_balance_u2 = n/a\n";
  }

  write_artifacts(cfg.outdir, report, run.series, run.final_state);
  std::cout << "outcome = " << outcome_name(run.outcome.kind)
            << " (t_final = " << format_double(run.outcome.t_final) << ")\n";
  return run.outcome.kind == OutcomeKind::BlowUp ? 3 : 0;
}

int run_threshold1(const RunConfig& cfg, const GridPtr& grid) {
  const SteadyResult steady =
      find_steady_robust(grid, cfg.params, cfg.solver, cfg.seed_scale);
  const ThresholdReport rep = run_threshold_part1(steady, cfg.params, cfg.l1,
                                                  cfg.l2, cfg.solver, cfg.t_end);

  std::string report = run_header(cfg);
  report += kvd("l1", rep.l1) + kvd("l2", rep.l2);
  report += kvd("steady_residual", steady.residual);
  report += std::string("outcome = ") + outcome_name(rep.outcome.kind) + "\n";
  report += kvd("t_final", rep.outcome.t_final);
  report += std::string("monotone_decay = ") + yesno(rep.monotone_decay_ok) + "\n";
  report += std::string("bounded_by_steady = ") + yesno(rep.bounded_ok) + "\n";
  write_artifacts(cfg.outdir, report, rep.series, rep.final_state);

  const bool ok = rep.monotone_decay_ok && rep.bounded_ok;
  std::cout << "threshold1: " << (ok ? "PASS" : "FAIL") << " (outcome = "
            << outcome_name(rep.outcome.kind) << ")\n";
  return ok ? 0 : 4;
}

int run_threshold2(const RunConfig& cfg, const GridPtr& grid) {
  const SteadyResult steady =
      find_steady_robust(grid, cfg.params, cfg.solver, cfg.seed_scale);
  const ThresholdReport rep = run_threshold_part2(steady, cfg.params, cfg.l1,
                                                  cfg.l2, cfg.solver, cfg.t_end);

  std::string report = run_header(cfg);
  report += kvd("l1", rep.l1) + kvd("l2", rep.l2);
  report += kvd("steady_residual", steady.residual);
  if (rep.epsilon) report += kvd("epsilon", *rep.epsilon);
  report += std::string("outcome = ") + outcome_name(rep.outcome.kind) + "\n";
  report += kvd("t_final", rep.outcome.t_final);
  if (rep.outcome.blowup_estimate)
    report += kvd("blowup_estimate", *rep.outcome.blowup_estimate);
  report += std::string("subsolution_bound = ") + yesno(rep.subsolution_ok) + "\n";
  report += std::string("y_monotone = ") + yesno(rep.y_monotone_ok) + "\n";
  write_artifacts(cfg.outdir, report, rep.series, rep.final_state);

  const bool ok = rep.subsolution_ok && rep.y_monotone_ok;
  std::cout << "threshold2: " << (ok ? "PASS" : "FAIL") << " (outcome = "
            << outcome_name(rep.outcome.kind) << ")\n";
  return ok ? 3 : 4;
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

int run_sweep(const RunConfig& cfg, const GridPtr& grid) {
  const SweepAxis axis = sweep_axis_from_name(cfg.sweep_axis);
  const std::vector<SweepRow> rows =
      sweep(grid, cfg.params, axis, cfg.sweep_values, cfg.l1, cfg.l2,
            cfg.solver, cfg.t_end);

  std::ostringstream csv;
  csv << "value,l1,l2,outcome,t_final,peak_linf_u1,peak_linf_u2,"
         "blowup_estimate,error\n";
  int errors = 0;
  for (const SweepRow& r : rows) {
    if (!r.error.empty()) ++errors;
    csv << format_double(r.value) << "," << format_double(r.l1) << ","
        << format_double(r.l2) << ",";
    if (r.error.empty()) {
      csv << outcome_name(r.kind) << "," << format_double(r.t_final) << ","
          << format_double(r.peak_linf_u1) << ","
          << format_double(r.peak_linf_u2) << ","
          << (r.blowup_estimate ? format_double(*r.blowup_estimate) : "")
          << ",";
    } else {
      csv << ",,,,," << csv_safe(r.error);
    }
    csv << "\n";
  }
  write_text(cfg.outdir + "/sweep.csv", csv.str());

  std::string report = run_header(cfg);
  report += "axis = " + cfg.sweep_axis + "\n";
  report += "rows = " + std::to_string(rows.size()) + "\n";
  report += "errors = " + std::to_string(errors) + "\n";
  report += csv.str();
  write_artifacts(cfg.outdir, report, TimeSeries{},
                  StatePair(Field(grid), Field(grid), 0.0));
  std::cout << "sweep: " << rows.size() << " rows, " << errors << " errors\n";
  return errors == 0 ? 0 : 4;
}

// --- self-check command ------------------------------------------------

double u01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct CheckLine {
  bool pass = false;
  std::string text;
};

CheckLine check_comparison(const Params& p) {
  const GridPtr grid = make_interval(0.0, 1.0, 101);
  SolverOptions opt;
  opt.dt_init = 1e-3;
  opt.dt_max = 1e-3;

  bool pass = true;
  std::size_t compared = 0;
  double max_excess = 0.0;
  for (int k = 0; k < 3; ++k) {
    std::mt19937_64 gen(1000 + k);
    Field b1(grid), b2(grid), a1(grid), a2(grid);
    for (std::size_t i = 0; i < b1.size(); ++i) {
      b1.v[i] = 0.5 + u01(gen);
      b2.v[i] = 0.5 + u01(gen);
      a1.v[i] = b1.v[i] * (0.3 + 0.6 * u01(gen));
      a2.v[i] = b2.v[i] * (0.3 + 0.6 * u01(gen));
    }
    const EvolveResult low =
        evolve(StatePair(a1, a2, 0.0), 0.3, p, opt, 0.0, true);
    const EvolveResult high =
        evolve(StatePair(b1, b2, 0.0), 0.3, p, opt, 0.0, true);
    const ComparisonReport rep = comparison_check(low, high);
    pass = pass && rep.ok && rep.compared >= 2;
    compared += rep.compared;
    max_excess = std::max(max_excess, rep.max_excess);
  }
  return {pass, "comparison: pairs=3 compared=" + std::to_string(compared) +
                    " max_excess=" + format_double(max_excess)};
}

CheckLine check_positivity(const Params& p) {
  const GridPtr grid = make_interval(0.0, 1.0, 101);
  const SolverOptions opt;
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    std::mt19937_64 gen(2000 + k);
    Field u1(grid), u2(grid);
    for (std::size_t i = 0; i < u1.size(); ++i) {
      u1.v[i] = 2.0 * u01(gen);
      u2.v[i] = 2.0 * u01(gen);
    }
    StatePair s(u1, u2, 0.0);
    for (int n = 0; n < 30; ++n) {
      s = step(s, 2e-3, p, opt, 0.0);
      for (double v : s.u1.v) worst = std::min(worst, v);
      for (double v : s.u2.v) worst = std::min(worst, v);
    }
  }
  return {worst >= -1e-12, "positivity: runs=5 min_value=" + format_double(worst)};
}

CheckLine check_cutoff(const Params& p) {
  const GridPtr grid = make_interval(0.0, 1.0, 101);
  const SolverOptions opt;
  std::mt19937_64 gen(3000);
  Field u1(grid), u2(grid);
  for (std::size_t i = 0; i < u1.size(); ++i) {
    u1.v[i] = 1.5 * u01(gen);
    u2.v[i] = 1.5 * u01(gen);
  }
  const StatePair s0(u1, u2, 0.0);
  const EvolveResult plain = evolve(s0, 0.2, p, opt, 0.0, false);
  const double M =
      std::max(plain.outcome.peak_linf_u1, plain.outcome.peak_linf_u2) + 1.0;
  const EvolveResult clamped = evolve(s0, 0.2, p, opt, M, false);

  double diff = std::abs(plain.outcome.t_final - clamped.outcome.t_final);
  for (std::size_t i = 0; i < plain.final_state.u1.size(); ++i) {
    diff = std::max(diff, std::abs(plain.final_state.u1.v[i] -
                                   clamped.final_state.u1.v[i]));
    diff = std::max(diff, std::abs(plain.final_state.u2.v[i] -
                                   clamped.final_state.u2.v[i]));
  }
  return {diff <= 1e-12, "cutoff: M=" + format_double(M) +
                             " max_diff=" + format_double(diff)};
}

CheckLine check_bracket() {
  const double betas[] = {0.5, 1.0, 2.0};
  const double alphas[] = {0.0, 0.5, 1.0, 2.0, 4.0};
  const double gammas[] = {2.0, 2.5, 3.0};
  int cases = 0, bad = 0;
  for (double beta : betas)
    for (double alpha : alphas)
      for (double gamma : gammas) {
        BracketParams bp;
        bp.beta = beta;
        bp.alpha = alpha;
        bp.gamma = gamma;
        bp.shift = 1.0;
        const bool expect_finite = gamma > 2.0 || alpha <= 2.0 * beta;
        const BracketResult res = bracket_infimum(bp);
        ++cases;
        if (res.finite != expect_finite) ++bad;
      }
  return {bad == 0, "bracket: cases=" + std::to_string(cases) +
                        " mismatches=" + std::to_string(bad)};
}

int run_check(const RunConfig& cfg, const GridPtr& grid) {
  const CheckLine lines[] = {check_comparison(cfg.params),
                             check_positivity(cfg.params),
                             check_cutoff(cfg.params), check_bracket()};
  std::string report = run_header(cfg);
  bool all = true;
  for (const CheckLine& ln : lines) {
    all = all && ln.pass;
    const std::string row =
        std::string(ln.pass ? "PASS " : "FAIL ") + ln.text + "\n";
    report += row;
    std::cout << row;
  }
  report += std::string("overall = ") + (all ? "PASS" : "FAIL") + "\n";
  std::cout << "overall = " << (all ? "PASS" : "FAIL") << "\n";
  write_artifacts(cfg.outdir, report, TimeSeries{},
                  StatePair(Field(grid), Field(grid), 0.0));
  return all ? 0 : 4;
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.outdir);
    const GridPtr grid = cfg.grid.build();
    switch (cfg.command) {
      case Command::eig: return run_eig(cfg, grid);
      case Command::steady: return run_steady(cfg, grid);
      case Command::evolve: return run_evolve(cfg, grid);
      case Command::threshold1: return run_threshold1(cfg, grid);
      case Command::threshold2: return run_threshold2(cfg, grid);
      case Command::sweep: return run_sweep(cfg, grid);
      case Command::check: return run_check(cfg, grid);
    }
    throw StateError("run: unknown command");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}

}  // namespace nrrd
