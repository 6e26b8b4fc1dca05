#include "nrrd/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nrrd/errors.hpp"
#include "nrrd/norms.hpp"
#include "nrrd/operators.hpp"
#include "nrrd/spectral.hpp"

namespace nrrd {

namespace {

// Evolution is well defined for a = 0 (decoupled diagnostics), so this is
// deliberately looser than Params::validate.
void check_evolution_params(const Params& p) {
  if (!(std::isfinite(p.a) && p.a >= 0.0))
    throw DomainError("evolve: a must be finite and >= 0");
  if (!(std::isfinite(p.b) && p.b > 0.0))
    throw DomainError("evolve: b must be finite and > 0");
  if (!(std::isfinite(p.alpha) && p.alpha >= 0.0))
    throw DomainError("evolve: alpha must be finite and >= 0");
  if (!(std::isfinite(p.beta) && p.beta > 0.0))
    throw DomainError("evolve: beta must be finite and > 0");
  if (!(std::isfinite(p.gamma) && p.gamma >= 2.0))
    throw DomainError("evolve: gamma must be finite and >= 2");
}

void check_step_state(const StatePair& s) {
  check_finite(s.u1, "step u1");
  check_finite(s.u2, "step u2");
  for (double x : s.u1.v)
    if (x < -1e-9) throw DomainError("step: u1 must be nonnegative");
  for (double x : s.u2.v)
    if (x < -1e-9) throw DomainError("step: u2 must be nonnegative");
}

double pow_clip(double u, double e) { return std::pow(std::max(u, 0.0), e); }

}  // namespace

Field apply_cutoff(const Field& f, double M) {
  if (!(std::isfinite(M) && M > 0.0))
    throw DomainError("apply_cutoff: M must be finite and > 0");
  Field out = f;
  for (double& x : out.v) x = std::clamp(x, -M, M);
  return out;
}

StatePair step(const StatePair& state, double dt, const Params& p,
               const SolverOptions& opt, double cutoff_M) {
  check_evolution_params(p);
  check_step_state(state);
  if (!(std::isfinite(dt) && dt > 0.0))
    throw DomainError("step: dt must be finite and > 0");
  if (cutoff_M < 0.0 || !std::isfinite(cutoff_M))
    throw DomainError("step: cutoff_M must be finite and >= 0");

  const GridPtr grid = state.grid();
  const Grid& g = *grid;
  const std::size_t n = g.size();

  // frozen reaction coefficient
  std::vector<double> R(n);
  double max_R = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double r = state.u2.v[i];
    if (cutoff_M > 0.0) r = std::clamp(r, -cutoff_M, cutoff_M);
    R[i] = r;
    max_R = std::max(max_R, r);
  }
  // the u1 system stays an M-matrix (hence positivity-preserving and
  // solvable) only while 1 + dt*(b - R) stays positive
  if (dt * (max_R - p.b) >= 1.0) throw StepError("step: reaction too stiff for this dt", dt);

  try {
    // u1: (I + dt*(-lap + alpha-closure + b - R)) u1' = u1
    EllipticOperator a1(grid, dt);
    for (std::size_t i = 0; i < n; ++i) a1.d[i] = 1.0 + dt * (p.b - R[i]);
    for (int i : g.bnodes) a1.d[i] += dt * p.alpha * g.closure[i];
    const double tol1 = 1e-13 * (1.0 + linf_norm(state.u1));
    std::vector<double> u1n =
        a1.solve(state.u1.v, tol1, 400 * static_cast<int>(n));

    // u2: (I + dt*(-lap)) u2' + dt*beta*closure*|u2'|^(g-2) u2' = u2 + dt*a*u1'
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = state.u2.v[i] + dt * p.a * u1n[i];
    double rhs_norm = 0.0;
    for (double x : rhs) rhs_norm = std::max(rhs_norm, std::abs(x));
    const double tol2 = 1e-13 * (1.0 + rhs_norm);

    std::vector<double> u2n;
    if (p.gamma == 2.0) {
      EllipticOperator a2(grid, dt);
      for (std::size_t i = 0; i < n; ++i) a2.d[i] = 1.0;
      for (int i : g.bnodes) a2.d[i] += dt * p.beta * g.closure[i];
      u2n = a2.solve(rhs, tol2, 400 * static_cast<int>(n));
    } else {
      // Newton on the boundary nonlinearity, warm start at the old u2
      u2n = state.u2.v;
      EllipticOperator base(grid, dt);
      for (std::size_t i = 0; i < n; ++i) base.d[i] = 1.0;
      std::vector<double> resid(n);
      const double newton_tol = opt.newton_tol * (1.0 + rhs_norm);

      auto eval = [&](const std::vector<double>& w, std::vector<double>& out) {
        base.apply(w, out);
        for (int i : g.bnodes)
          out[i] += dt * p.beta * g.closure[i] *
                    pow_clip(w[i], p.gamma - 2.0) * std::max(w[i], 0.0);
        for (std::size_t i = 0; i < n; ++i) out[i] -= rhs[i];
      };
      auto sup = [](const std::vector<double>& w) {
        double m = 0.0;
        for (double x : w) m = std::max(m, std::abs(x));
        return m;
      };

      eval(u2n, resid);
      double rnorm = sup(resid);
      bool done = rnorm <= newton_tol;
      for (int it = 0; it < 50 && !done; ++it) {
        EllipticOperator jac(grid, dt);
        for (std::size_t i = 0; i < n; ++i) jac.d[i] = 1.0;
        for (int i : g.bnodes)
          jac.d[i] += dt * p.beta * g.closure[i] * (p.gamma - 1.0) *
                      pow_clip(u2n[i], p.gamma - 2.0);
        std::vector<double> neg(resid);
        for (double& x : neg) x = -x;
        const std::vector<double> delta =
            jac.solve(neg, tol2, 400 * static_cast<int>(n));

        double tstep = 1.0;
        bool accepted = false;
        std::vector<double> trial(n), rt(n);
        for (int cut = 0; cut < 30; ++cut) {
          for (std::size_t i = 0; i < n; ++i)
            trial[i] = u2n[i] + tstep * delta[i];
          eval(trial, rt);
          const double rtn = sup(rt);
          if (rtn < (1.0 - 1e-4 * tstep) * rnorm) {
            u2n.swap(trial);
            resid.swap(rt);
            rnorm = rtn;
            accepted = true;
            break;
          }
          tstep *= 0.5;
        }
        if (!accepted) throw StepError("step: boundary Newton line search stalled", dt);
        done = rnorm <= newton_tol;
      }
      if (!done) throw StepError("step: boundary Newton did not converge", dt);
    }

    StatePair out;
    out.u1 = Field(grid);
    out.u2 = Field(grid);
    out.u1.v = std::move(u1n);
    out.u2.v = std::move(u2n);
    out.t = state.t + dt;
    return out;
  } catch (const SolvabilityError&) {
    throw StepError("step: inner linear solve not solvable", dt);
  } catch (const ConvergenceError&) {
    throw StepError("step: inner linear solve did not converge", dt);
  }
}

namespace {

SeriesRow make_row(const StatePair& s, const Field& phi1, double gamma,
                   double dt_used) {
  const Grid& g = *s.grid();
  SeriesRow row;
  row.t = s.t;
  row.dt = dt_used;
  row.linf_u1 = linf_norm(s.u1);
  row.linf_u2 = linf_norm(s.u2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.wq[i] * phi1.v[i];
    row.mass_u1 += w * s.u1.v[i];
    row.mass_u2 += w * s.u2.v[i];
    row.mass_u1u2 += w * s.u1.v[i] * s.u2.v[i];
  }
  for (int i : g.bnodes) {
    const double w = g.bweight[i] * phi1.v[i];
    row.bnd_u2 += w * s.u2.v[i];
    row.bnd_u2_gamma += w * std::pow(std::max(s.u2.v[i], 0.0), gamma);
  }
  return row;
}

double state_diff_linf(const StatePair& a, const StatePair& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.u1.v.size(); ++i) {
    m = std::max(m, std::abs(a.u1.v[i] - b.u1.v[i]));
    m = std::max(m, std::abs(a.u2.v[i] - b.u2.v[i]));
  }
  return m;
}

}  // namespace

EvolveResult evolve(const StatePair& state0, double t_end, const Params& p,
                    const SolverOptions& opt, double cutoff_M,
                    bool record_states) {
  check_evolution_params(p);
  opt.validate();
  check_step_state(state0);
  if (!(std::isfinite(t_end) && t_end > state0.t))
    throw DomainError("evolve: t_end must exceed the initial time");

  EvolveResult out;
  const EigenPair ep =
      robin_eigenpair(state0.grid(), p.alpha, EigenNorm::l1_unit, opt);
  out.lambda1 = ep.lambda;
  out.phi1 = ep.phi;

  StatePair s = state0;
  for (double& x : s.u1.v) x = std::max(x, 0.0);  // scrub entry roundoff
  for (double& x : s.u2.v) x = std::max(x, 0.0);

  double linf1 = linf_norm(s.u1), linf2 = linf_norm(s.u2);
  out.outcome.peak_linf_u1 = linf1;
  out.outcome.peak_linf_u2 = linf2;
  bool crossed1 = linf1 > opt.blowup_threshold;
  bool crossed2 = linf2 > opt.blowup_threshold;

  out.series.rows.push_back(make_row(s, out.phi1, p.gamma, 0.0));
  if (record_states) out.states.push_back(s);

  double dt_ctrl = opt.dt_init;
  double last_dt = 0.0;
  int calm = 0, steady_count = 0;
  long accepted = 0;
  OutcomeKind kind = OutcomeKind::Inconclusive;

  for (;;) {
    if (linf1 + linf2 <= opt.decay_threshold) {
      kind = OutcomeKind::Decayed;
      break;
    }
    if (crossed1 && crossed2) {
      kind = OutcomeKind::BlowUp;
      break;
    }
    if (steady_count >= 50) {
      kind = OutcomeKind::ConvergedToSteady;
      break;
    }
    // horizon, absorbing the roundoff accumulated by `accepted` additions to
    // s.t (would otherwise force a ~1e-13 closing step that ruins the
    // uniform spacing of strided samples)
    const double arrive = std::max(1.0, std::abs(t_end)) *
                          std::max(1e-14, 5e-16 * static_cast<double>(accepted + 2));
    if (s.t >= t_end - arrive) {
      const double told = s.t;
      s.t = t_end;
      if (out.series.rows.back().t == told) out.series.rows.back().t = t_end;
      if (record_states && out.states.back().t == told) out.states.back().t = t_end;
      break;
    }
    if (dt_ctrl < opt.dt_min) break;  // stalled

    const double dt_used = std::min(dt_ctrl, t_end - s.t);
    StatePair snew;
    try {
      snew = step(s, dt_used, p, opt, cutoff_M);
    } catch (const StepError&) {
      dt_ctrl = 0.5 * dt_used;
      calm = 0;
      continue;
    }

    const double n1 = linf_norm(snew.u1), n2 = linf_norm(snew.u2);
    double growth = 0.0;
    if (linf1 > opt.decay_threshold) growth = std::max(growth, n1 / linf1);
    if (linf2 > opt.decay_threshold) growth = std::max(growth, n2 / linf2);

    const double rate = state_diff_linf(snew, s) / dt_used;

    s = std::move(snew);
    linf1 = n1;
    linf2 = n2;
    last_dt = dt_used;
    ++accepted;
    out.outcome.peak_linf_u1 = std::max(out.outcome.peak_linf_u1, linf1);
    out.outcome.peak_linf_u2 = std::max(out.outcome.peak_linf_u2, linf2);
    if (!crossed1 && linf1 > opt.blowup_threshold) crossed1 = true;
    if (!crossed2 && linf2 > opt.blowup_threshold) crossed2 = true;

    const double scale = linf1 + linf2;
    if (rate < 1e-10 && scale > opt.decay_threshold &&
        std::max(linf1, linf2) < opt.blowup_threshold)
      ++steady_count;
    else
      steady_count = 0;

    if (growth > 1.2) {
      dt_ctrl = 0.5 * dt_used;
      calm = 0;
    } else if (++calm >= 10) {
      dt_ctrl = std::min(2.0 * dt_ctrl, opt.dt_max);
      calm = 0;
    }

    if (accepted % opt.sample_stride == 0) {
      out.series.rows.push_back(make_row(s, out.phi1, p.gamma, dt_used));
      if (record_states) out.states.push_back(s);
    }
  }

  // make sure the series ends at the final state
  if (out.series.rows.back().t < s.t) {
    out.series.rows.push_back(make_row(s, out.phi1, p.gamma, last_dt));
    if (record_states) out.states.push_back(s);
  }

  out.outcome.kind = kind;
  out.outcome.t_final = s.t;
  out.final_state = std::move(s);

  if (kind == OutcomeKind::BlowUp) {
    // least-squares line through the last three samples of 1/||u2||
    const std::size_t m = out.series.rows.size();
    double est = out.outcome.t_final;
    if (m >= 3) {
      double st = 0, sz = 0, stt = 0, stz = 0;
      for (std::size_t k = m - 3; k < m; ++k) {
        const double t = out.series.rows[k].t;
        const double z = 1.0 / std::max(out.series.rows[k].linf_u2,
                                        std::numeric_limits<double>::min());
        st += t;
        sz += z;
        stt += t * t;
        stz += t * z;
      }
      const double det = 3.0 * stt - st * st;
      if (det > 0.0) {
        const double c1 = (3.0 * stz - st * sz) / det;
        const double c0 = (sz * stt - st * stz) / det;
        if (c1 < 0.0) est = std::max(est, -c0 / c1);
      }
    }
    out.outcome.blowup_estimate = est;
  }
  return out;
}

ComparisonReport comparison_check(const EvolveResult& a,
                                  const EvolveResult& b) {
  if (a.states.empty() || b.states.empty())
    throw StateError("comparison_check: both runs need recorded states");
  check_same_grid(a.states[0].u1, b.states[0].u1, "comparison_check");

  const StatePair& a0 = a.states[0];
  const StatePair& b0 = b.states[0];
  for (std::size_t i = 0; i < a0.u1.v.size(); ++i)
    if (a0.u1.v[i] > b0.u1.v[i] || a0.u2.v[i] > b0.u2.v[i])
      throw DomainError("comparison_check: initial data not ordered A <= B");

  const double slack =
      1e-8 * (1.0 + std::max(b.outcome.peak_linf_u1, b.outcome.peak_linf_u2));

  ComparisonReport rep;
  std::size_t ia = 0, ib = 0;
  while (ia < a.states.size() && ib < b.states.size()) {
    const double ta = a.states[ia].t, tb = b.states[ib].t;
    const double close = 1e-12 * (1.0 + std::abs(ta));
    if (std::abs(ta - tb) <= close) {
      double excess = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < a.states[ia].u1.v.size(); ++i) {
        excess = std::max(excess, a.states[ia].u1.v[i] - b.states[ib].u1.v[i]);
        excess = std::max(excess, a.states[ia].u2.v[i] - b.states[ib].u2.v[i]);
      }
      rep.max_excess = std::max(rep.max_excess, excess);
      if (excess > slack && rep.first_violation < 0) {
        rep.first_violation = static_cast<long>(rep.compared);
        rep.ok = false;
      }
      ++rep.compared;
      ++ia;
      ++ib;
    } else if (ta < tb) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return rep;
}

}  // namespace nrrd
