#include "nrrd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "nrrd/errors.hpp"
#include "nrrd/norms.hpp"

namespace nrrd {

namespace {

enum class ProbeResult { positive, decayed, diverged, failed };

ProbeResult probe_seed(const GridPtr& grid, const Params& p,
                       const SolverOptions& opt, double sigma,
                       SteadyResult* out) {
  try {
    SteadyResult r = find_positive_steady(grid, p, sigma, opt);
    if (r.classification == SteadyClass::positive) {
      *out = std::move(r);
      return ProbeResult::positive;
    }
    if (r.classification == SteadyClass::trivial_zero)
      return ProbeResult::decayed;
    return ProbeResult::failed;
  } catch (const DivergenceError&) {
    return ProbeResult::diverged;
  } catch (const ConvergenceError&) {
    return ProbeResult::failed;
  }
}

}  // namespace

SteadyResult find_steady_robust(const GridPtr& grid, const Params& p,
                                const SolverOptions& opt, double seed_hint) {
  if (!(std::isfinite(seed_hint) && seed_hint > 0.0))
    throw DomainError("find_steady_robust: seed hint must be positive");

  SteadyResult res;
  ProbeResult first = probe_seed(grid, p, opt, seed_hint, &res);
  if (first == ProbeResult::positive) return res;

  // The positive state is the separatrix between seeds whose fixed-point
  // iteration collapses to zero and seeds that diverge; bisect that boundary.
  // Iterations near the boundary stall next to the positive state, and the
  // Newton polish captures it.
  double lo = 0.0, hi = 0.0;
  if (first == ProbeResult::diverged) {
    hi = seed_hint;
    double s = seed_hint;
    for (int k = 0; k < 60 && !(lo > 0.0); ++k) {
      s /= 3.0;
      switch (probe_seed(grid, p, opt, s, &res)) {
        case ProbeResult::positive: return res;
        case ProbeResult::diverged: hi = s; break;
        default: lo = s; break;
      }
    }
  } else {
    lo = seed_hint;
    double s = seed_hint;
    for (int k = 0; k < 60 && !(hi > 0.0); ++k) {
      s *= 3.0;
      switch (probe_seed(grid, p, opt, s, &res)) {
        case ProbeResult::positive: return res;
        case ProbeResult::diverged: hi = s; break;
        default: lo = s; break;
      }
    }
  }
  if (!(lo > 0.0 && hi > lo))
    throw StateError("find_steady_robust: no decay/divergence bracket found");

  for (int k = 0; k < 200; ++k) {
    if (hi - lo <= 1e-13 * hi) break;
    const double mid = std::sqrt(lo * hi);
    switch (probe_seed(grid, p, opt, mid, &res)) {
      case ProbeResult::positive: return res;
      case ProbeResult::diverged: hi = mid; break;
      default: lo = mid; break;
    }
  }
  throw StateError("find_steady_robust: bisection exhausted without capture");
}

double choose_epsilon(const StatePair& steady, double l1, double l2, double a) {
  if (!(std::isfinite(l1) && std::isfinite(l2)))
    throw DomainError("choose_epsilon: scaling factors must be finite");
  if (!(l2 > 1.0)) throw DomainError("choose_epsilon: need l2 > 1");
  if (!(l1 > l2)) throw DomainError("choose_epsilon: need l1 > l2");
  if (!(std::isfinite(a) && a > 0.0))
    throw DomainError("choose_epsilon: a must be finite and > 0");
  check_finite(steady.u1, "choose_epsilon u1");
  check_finite(steady.u2, "choose_epsilon u2");

  double min_ratio = std::numeric_limits<double>::infinity();
  double min_u2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < steady.u1.v.size(); ++i) {
    const double v1 = steady.u1.v[i], v2 = steady.u2.v[i];
    if (!(v1 > 0.0 && v2 > 0.0))
      throw DomainError("choose_epsilon: steady state must be strictly positive");
    min_ratio = std::min(min_ratio, v1 / v2);
    min_u2 = std::min(min_u2, v2);
  }

  const double cand1 = a * (l1 - l2) * min_ratio / l2;
  const double cand2 = (l2 - 1.0) * min_u2;
  const double eps = 0.5 * std::min(cand1, cand2);

  // the subsolution inequalities must hold strictly at every node
  for (std::size_t i = 0; i < steady.u1.v.size(); ++i) {
    const double v1 = steady.u1.v[i], v2 = steady.u2.v[i];
    if (!(eps * l2 * v2 < a * (l1 - l2) * v1) || !(eps < (l2 - 1.0) * v2))
      throw DomainError("choose_epsilon: strict inequality check failed");
  }
  return eps;
}

namespace {

StatePair scaled_state(const StatePair& steady, double l1, double l2) {
  StatePair s = steady;
  for (double& x : s.u1.v) x *= l1;
  for (double& x : s.u2.v) x *= l2;
  s.t = 0.0;
  return s;
}

// y(t) = weighted mass of u2, plus the accumulated weighted boundary term
// when beta exceeds alpha (trapezoid in time over the recorded samples).
std::vector<double> build_y_series(const TimeSeries& series, const Params& p) {
  std::vector<double> y(series.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (p.beta > p.alpha && k > 0) {
      const double dt = series[k].t - series[k - 1].t;
      acc += 0.5 * dt * (series[k].bnd_u2 + series[k - 1].bnd_u2);
    }
    y[k] = series[k].mass_u2 + (p.beta > p.alpha ? (p.beta - p.alpha) * acc : 0.0);
  }
  return y;
}

void require_positive_steady(const SteadyResult& steady) {
  if (steady.classification != SteadyClass::positive)
    throw StateError("threshold run needs a positive steady state");
}

}  // namespace

ThresholdReport run_threshold_part1(const SteadyResult& steady, const Params& p,
                                    double l1, double l2,
                                    const SolverOptions& opt, double t_end) {
  p.validate();
  opt.validate();
  if (!(l1 > 0.0 && l1 < l2 && l2 <= 1.0))
    throw DomainError("threshold part 1: need 0 < l1 < l2 <= 1");
  require_positive_steady(steady);

  ThresholdReport rep;
  rep.steady = steady;
  rep.l1 = l1;
  rep.l2 = l2;

  EvolveResult run =
      evolve(scaled_state(steady.state, l1, l2), t_end, p, opt, 0.0, true);
  rep.outcome = run.outcome;
  rep.series = run.series;
  rep.final_state = run.final_state;
  rep.y_series = build_y_series(run.series, p);

  if (run.outcome.kind == OutcomeKind::BlowUp)
    throw ConvergenceError("threshold part 1: run blew up below the threshold");
  if (run.outcome.kind == OutcomeKind::Inconclusive) {
    const SeriesRow& first = run.series.rows.front();
    const SeriesRow& last = run.series.rows.back();
    if (!(last.linf_u1 + last.linf_u2 < first.linf_u1 + first.linf_u2))
      throw ConvergenceError(
          "threshold part 1: inconclusive run without decreasing norms");
  }

  rep.monotone_decay_ok = true;
  for (std::size_t k = 0; k + 1 < run.states.size(); ++k) {
    const StatePair& a = run.states[k];
    const StatePair& b = run.states[k + 1];
    for (std::size_t i = 0; i < a.u1.v.size(); ++i) {
      if (b.u1.v[i] > a.u1.v[i] + 1e-9 || b.u2.v[i] > a.u2.v[i] + 1e-9) {
        rep.monotone_decay_ok = false;
        break;
      }
    }
    if (!rep.monotone_decay_ok) break;
  }

  rep.bounded_ok = true;
  for (const StatePair& s : run.states) {
    for (std::size_t i = 0; i < s.u1.v.size(); ++i) {
      if (s.u1.v[i] > steady.state.u1.v[i] + 1e-9 ||
          s.u2.v[i] > steady.state.u2.v[i] + 1e-9) {
        rep.bounded_ok = false;
        break;
      }
    }
    if (!rep.bounded_ok) break;
  }
  return rep;
}

ThresholdReport run_threshold_part1(const GridPtr& grid, const Params& p,
                                    double l1, double l2,
                                    const SolverOptions& opt, double t_end) {
  return run_threshold_part1(find_steady_robust(grid, p, opt), p, l1, l2, opt,
                             t_end);
}

ThresholdReport run_threshold_part2(const SteadyResult& steady, const Params& p,
                                    double l1, double l2,
                                    const SolverOptions& opt, double t_end) {
  p.validate();
  opt.validate();
  if (p.gamma != 2.0)
    throw DomainError("threshold part 2: needs gamma == 2");
  if (!(p.alpha <= 2.0 * p.beta))
    throw DomainError("threshold part 2: needs alpha <= 2*beta");
  if (!(l2 > 1.0 && l1 > l2))
    throw DomainError("threshold part 2: need l1 > l2 > 1");
  require_positive_steady(steady);

  ThresholdReport rep;
  rep.steady = steady;
  rep.l1 = l1;
  rep.l2 = l2;
  rep.epsilon = choose_epsilon(steady.state, l1, l2, p.a);

  EvolveResult run =
      evolve(scaled_state(steady.state, l1, l2), t_end, p, opt, 0.0, true);
  rep.outcome = run.outcome;
  rep.series = run.series;
  rep.final_state = run.final_state;
  rep.y_series = build_y_series(run.series, p);

  if (run.outcome.kind != OutcomeKind::BlowUp)
    throw ConvergenceError("threshold part 2: run did not blow up");

  const double eps = *rep.epsilon;
  const double t_verify = 0.9 * run.outcome.blowup_estimate.value_or(
                                    run.outcome.t_final);
  rep.subsolution_ok = true;
  for (const StatePair& s : run.states) {
    if (s.t > t_verify) break;
    const double grow = std::exp(eps * s.t);
    const double tol1 = 1e-6 * linf_norm(s.u1);
    const double tol2 = 1e-6 * linf_norm(s.u2);
    for (std::size_t i = 0; i < s.u1.v.size(); ++i) {
      if (s.u1.v[i] < l1 * grow * steady.state.u1.v[i] - tol1 ||
          s.u2.v[i] < l2 * grow * steady.state.u2.v[i] - tol2) {
        rep.subsolution_ok = false;
        break;
      }
    }
    if (!rep.subsolution_ok) break;
  }

  rep.y_monotone_ok = true;
  for (std::size_t k = 3; k + 1 < rep.y_series.size(); ++k) {
    if (rep.y_series[k + 1] <
        rep.y_series[k] - 1e-9 * (1.0 + std::abs(rep.y_series[k]))) {
      rep.y_monotone_ok = false;
      break;
    }
  }
  return rep;
}

ThresholdReport run_threshold_part2(const GridPtr& grid, const Params& p,
                                    double l1, double l2,
                                    const SolverOptions& opt, double t_end) {
  return run_threshold_part2(find_steady_robust(grid, p, opt), p, l1, l2, opt,
                             t_end);
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "a") return SweepAxis::a;
  if (name == "b") return SweepAxis::b;
  if (name == "alpha") return SweepAxis::alpha;
  if (name == "beta") return SweepAxis::beta;
  if (name == "gamma") return SweepAxis::gamma;
  if (name == "l1") return SweepAxis::l1;
  if (name == "l2") return SweepAxis::l2;
  throw DomainError("sweep: unknown axis '" + name + "'");
}

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::a: return "a";
    case SweepAxis::b: return "b";
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::beta: return "beta";
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::l1: return "l1";
    case SweepAxis::l2: return "l2";
  }
  return "?";
}

namespace {

int pool_width(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("NRRD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

std::vector<SweepRow> sweep(const GridPtr& grid, const Params& base,
                            SweepAxis axis, const std::vector<double>& values,
                            double l1, double l2, const SolverOptions& opt,
                            double t_end) {
  base.validate();
  opt.validate();
  std::vector<SweepRow> rows(values.size());
  if (values.empty()) return rows;

  // One shared anchor steady state; rows with changed parameters re-converge
  // from it by Newton continuation before falling back to the full search.
  SteadyResult base_steady;
  std::string base_error;
  try {
    base_steady = find_steady_robust(grid, base, opt);
  } catch (const Error& e) {
    base_error = e.what();
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= values.size()) return;
      SweepRow& row = rows[k];
      row.value = values[k];
      row.l1 = l1;
      row.l2 = l2;
      try {
        Params p = base;
        switch (axis) {
          case SweepAxis::a: p.a = row.value; break;
          case SweepAxis::b: p.b = row.value; break;
          case SweepAxis::alpha: p.alpha = row.value; break;
          case SweepAxis::beta: p.beta = row.value; break;
          case SweepAxis::gamma: p.gamma = row.value; break;
          case SweepAxis::l1: row.l1 = row.value; break;
          case SweepAxis::l2: row.l2 = row.value; break;
        }
        p.validate();
        if (!(row.l1 > 0.0 && row.l2 > 0.0))
          throw DomainError("sweep: scaling factors must be positive");

        SteadyResult steady;
        const bool params_changed =
            axis != SweepAxis::l1 && axis != SweepAxis::l2;
        if (!base_error.empty()) {
          steady = find_steady_robust(grid, p, opt);
        } else if (params_changed) {
          try {
            steady = find_positive_steady(base_steady.state, p, opt);
            if (steady.classification != SteadyClass::positive)
              steady = find_steady_robust(grid, p, opt);
          } catch (const Error&) {
            steady = find_steady_robust(grid, p, opt);
          }
        } else {
          steady = base_steady;
        }
        require_positive_steady(steady);

        const EvolveResult run = evolve(scaled_state(steady.state, row.l1, row.l2),
                                        t_end, p, opt, 0.0, false);
        row.kind = run.outcome.kind;
        row.t_final = run.outcome.t_final;
        row.peak_linf_u1 = run.outcome.peak_linf_u1;
        row.peak_linf_u2 = run.outcome.peak_linf_u2;
        row.blowup_estimate = run.outcome.blowup_estimate;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const int width = pool_width(values.size());
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (int i = 0; i < width; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return rows;
}

}  // namespace nrrd
