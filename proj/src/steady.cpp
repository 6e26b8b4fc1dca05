#include "nrrd/steady.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "nrrd/elliptic.hpp"
#include "nrrd/errors.hpp"
#include "nrrd/linalg.hpp"
#include "nrrd/norms.hpp"
#include "nrrd/operators.hpp"
#include "nrrd/spectral.hpp"

namespace nrrd {

namespace {

// |u|^(g-2)*u and its derivative, sign-safe
double power_bc(double u, double gamma) {
  return std::pow(std::abs(u), gamma - 2.0) * u;
}
double power_bc_slope(double u, double gamma) {
  if (gamma == 2.0) return 1.0;
  return (gamma - 1.0) * std::pow(std::abs(u), gamma - 2.0);
}

struct ResidualParts {
  std::vector<double> f1, f2;
  double sup = 0.0;
};

// Discrete stationary defect. Boundary rows carry the Robin / power-law
// closures through the reflected stencil.
ResidualParts stationary_residual(const Params& p, const StatePair& s) {
  const Grid& g = *s.grid();
  const std::size_t n = g.size();

  EllipticOperator lap(s.grid(), 1.0);  // pure reflected Laplacian
  ResidualParts r;
  r.f1.resize(n);
  r.f2.resize(n);
  lap.apply(s.u1.v, r.f1);
  lap.apply(s.u2.v, r.f2);
  for (std::size_t i = 0; i < n; ++i) {
    r.f1[i] += p.b * s.u1.v[i] - s.u1.v[i] * s.u2.v[i];
    r.f2[i] -= p.a * s.u1.v[i];
  }
  for (int i : g.bnodes) {
    r.f1[i] += p.alpha * g.closure[i] * s.u1.v[i];
    r.f2[i] += p.beta * g.closure[i] * power_bc(s.u2.v[i], p.gamma);
  }
  for (std::size_t i = 0; i < n; ++i)
    r.sup = std::max(r.sup, std::max(std::abs(r.f1[i]), std::abs(r.f2[i])));
  return r;
}

double state_linf(const StatePair& s) {
  return std::max(linf_norm(s.u1), linf_norm(s.u2));
}

void clamp_nonnegative(StatePair& s) {
  for (double& x : s.u1.v) x = std::max(x, 0.0);
  for (double& x : s.u2.v) x = std::max(x, 0.0);
}

// Damped Newton on the coupled stationary system, unknowns interleaved per
// node (u1_i at 2i, u2_i at 2i+1) so the Jacobian is banded: the cross terms
// are diagonal and the Laplacian couples nearest nodes of one component.
struct NewtonOutcome {
  StatePair state;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

NewtonOutcome coupled_newton(StatePair u, const Params& p,
                             const SolverOptions& opt) {
  const GridPtr grid = u.grid();
  const Grid& g = *grid;
  const std::size_t n = g.size();
  const int band = g.dim == 1 ? 2 : 2 * g.nx;

  // Evaluating the defect applies the stiff Laplacian rows, whose rounding
  // noise is eps * ||diag|| * ||u||; on fine grids or large states that floor
  // can sit above tol_residual, and no iteration can go below it.
  double diag_max = 0.0;
  {
    EllipticOperator lap(grid, 1.0);
    for (double x : lap.diagonal()) diag_max = std::max(diag_max, x);
  }
  const double eps_floor =
      2.0 * std::numeric_limits<double>::epsilon() * diag_max;
  const auto tol_at = [&](const StatePair& s) {
    return std::max(opt.tol_residual, eps_floor * std::max(1.0, state_linf(s)));
  };

  NewtonOutcome out{u, 0.0, 0, false};
  ResidualParts r = stationary_residual(p, out.state);
  out.residual = r.sup;

  for (int it = 0; it < 60; ++it) {
    if (out.residual <= opt.tol_residual) {
      out.converged = true;
      return out;
    }
    if (state_linf(out.state) > opt.blowup_threshold)
      throw DivergenceError("steady: Newton iterates diverged");

    // diagonal reaction terms of the two rows
    EllipticOperator row1(grid, 1.0);
    EllipticOperator row2(grid, 1.0);
    for (std::size_t i = 0; i < n; ++i) row1.d[i] = p.b - out.state.u2.v[i];
    for (int i : g.bnodes) {
      row1.d[i] += p.alpha * g.closure[i];
      row2.d[i] = p.beta * g.closure[i] * power_bc_slope(out.state.u2.v[i], p.gamma);
    }

    const int ni = static_cast<int>(n);
    BandMatrix J(2 * ni, band, band);
    for (int i = 0; i < ni; ++i) {
      row1.row(i, [&](int col, double a) { J.at(2 * i, 2 * col) += a; });
      J.at(2 * i, 2 * i + 1) += -out.state.u1.v[i];
      row2.row(i, [&](int col, double a) { J.at(2 * i + 1, 2 * col + 1) += a; });
      J.at(2 * i + 1, 2 * i) += -p.a;
    }
    J.factor();

    std::vector<double> delta(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      delta[2 * i] = -r.f1[i];
      delta[2 * i + 1] = -r.f2[i];
    }
    J.solve(delta);

    // backtracking on the sup-norm of the defect
    double t = 1.0;
    bool accepted = false;
    for (int cut = 0; cut < 40; ++cut) {
      StatePair trial = out.state;
      for (std::size_t i = 0; i < n; ++i) {
        trial.u1.v[i] += t * delta[2 * i];
        trial.u2.v[i] += t * delta[2 * i + 1];
      }
      ResidualParts rt = stationary_residual(p, trial);
      if (rt.sup < (1.0 - 1e-4 * t) * out.residual) {
        out.state = trial;
        r = rt;
        out.residual = rt.sup;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      // stalled: accept only when parked at the rounding floor
      out.converged = out.residual <= 4.0 * tol_at(out.state);
      return out;
    }
  }
  out.converged = out.residual <= 4.0 * tol_at(out.state);
  return out;
}

SteadyResult classify(NewtonOutcome nw, int picard_iters, SteadyMethod method,
                      const SolverOptions& opt) {
  if (!nw.converged)
    throw ConvergenceError("steady: Newton polish did not reach tolerance");
  SteadyResult res;
  res.state = std::move(nw.state);
  res.residual = nw.residual;
  res.iterations = picard_iters + nw.iterations;
  res.method = method;

  const double norm = state_linf(res.state);
  double min1 = res.state.u1.v[0], min2 = res.state.u2.v[0];
  for (double x : res.state.u1.v) min1 = std::min(min1, x);
  for (double x : res.state.u2.v) min2 = std::min(min2, x);

  // With the defect converged and u1 ~ 0, the only stationary u2 is 0, but
  // for gamma > 2 the boundary equation is degenerate there and leaves a
  // numeric residue of size (residual / (beta*closure))^(1/(gamma-1)); the
  // zero branch is therefore recognized from u1.
  if (linf_norm(res.state.u1) <= 1e-8 && linf_norm(res.state.u2) <= 0.1)
    res.classification = SteadyClass::trivial_zero;
  else if (min1 > 1e-10 * norm && min2 > 1e-10 * norm)
    res.classification = SteadyClass::positive;
  else
    res.classification = SteadyClass::failed;
  (void)opt;
  return res;
}

}  // namespace

double steady_residual(const Params& p, const StatePair& state) {
  p.validate();
  check_finite(state.u1, "steady_residual u1");
  check_finite(state.u2, "steady_residual u2");
  return stationary_residual(p, state).sup;
}

SteadyResult find_positive_steady(const GridPtr& grid, const Params& p,
                                  double seed_scale, const SolverOptions& opt) {
  p.validate();
  opt.validate();
  if (!std::isfinite(seed_scale) || seed_scale < 0.0)
    throw DomainError("steady: seed_scale must be finite and >= 0");
  if (!p.condition_A_or_B())
    std::fprintf(stderr,
                 "steady: warning: parameters admit no known positive state "
                 "(need gamma > 2 or alpha <= 2*beta); attempting anyway\n");

  if (seed_scale == 0.0) {
    SteadyResult res;
    res.state = StatePair{Field::sample(grid, [](double, double) { return 0.0; }),
                          Field::sample(grid, [](double, double) { return 0.0; }),
                          0.0};
    res.residual = 0.0;
    res.iterations = 0;
    res.method = SteadyMethod::picard;
    res.classification = SteadyClass::trivial_zero;
    return res;
  }

  const EigenPair ep = robin_eigenpair(grid, p.alpha, EigenNorm::l2_unit, opt);
  Field u1 = ep.phi;
  for (double& x : u1.v) x *= seed_scale;
  Field au1 = u1;
  for (double& x : au1.v) x *= p.a;
  Field u2 = solve_poisson_nonlinear_bc(grid, p.beta, p.gamma, au1, opt);
  StatePair u{u1, u2, 0.0};

  // Relaxed fixed-point phase. The positive state is a saddle of this map,
  // so we keep the best iterate seen (ignoring the collapse towards zero)
  // and hand it to Newton once progress stalls.
  StatePair best = u;
  double best_res = std::numeric_limits<double>::infinity();
  double best_norm = state_linf(u);
  double omega = opt.relax_omega;
  double prev_res = std::numeric_limits<double>::infinity();
  int decreases = 0, stagnant = 0, k = 0;
  bool enter_newton_from_best = false;

  for (;; ++k) {
    clamp_nonnegative(u);
    const StatePair v = psi_map(u, p, opt);
    double diff = 0.0;
    for (std::size_t i = 0; i < u.u1.v.size(); ++i) {
      diff = std::max(diff, std::abs(v.u1.v[i] - u.u1.v[i]));
      diff = std::max(diff, std::abs(v.u2.v[i] - u.u2.v[i]));
    }
    const double norm = state_linf(u);
    const double rel = diff / (1.0 + norm);

    if (rel < best_res && norm >= 0.25 * best_norm) {
      best = u;
      best_res = rel;
      best_norm = norm;
      stagnant = 0;
    } else {
      ++stagnant;
    }

    if (rel <= 1e-6) break;  // Newton from the current iterate
    if (stagnant >= 10) {
      enter_newton_from_best = true;
      break;
    }
    if (norm > opt.blowup_threshold)
      throw DivergenceError("steady: Picard iterates diverged");
    if (k >= opt.max_iter) {
      if (best_res <= 1e-2) {
        enter_newton_from_best = true;
        break;
      }
      throw ConvergenceError("steady: Picard phase exhausted max_iter");
    }

    if (rel > prev_res) {
      omega = std::max(omega * 0.5, opt.relax_omega / 64.0);
      decreases = 0;
    } else if (++decreases >= 3) {
      omega = std::min(opt.relax_omega, 2.0 * omega);
      decreases = 0;
    }
    prev_res = rel;

    for (std::size_t i = 0; i < u.u1.v.size(); ++i) {
      u.u1.v[i] = (1.0 - omega) * u.u1.v[i] + omega * v.u1.v[i];
      u.u2.v[i] = (1.0 - omega) * u.u2.v[i] + omega * v.u2.v[i];
    }
  }

  NewtonOutcome nw = coupled_newton(enter_newton_from_best ? best : u, p, opt);
  return classify(std::move(nw), k + 1, SteadyMethod::picard_then_newton, opt);
}

SteadyResult find_positive_steady(const StatePair& seed, const Params& p,
                                  const SolverOptions& opt) {
  p.validate();
  opt.validate();
  check_finite(seed.u1, "steady seed u1");
  check_finite(seed.u2, "steady seed u2");

  StatePair s0 = seed;
  clamp_nonnegative(s0);
  const double seed_norm = state_linf(s0);

  // Scaling pre-search: the stationary system is nearly scale-covariant, so
  // seeds proportional to a solution recover it exactly; for everything else
  // this just picks the best starting point for Newton among rescalings.
  StatePair start = s0;
  double start_res = stationary_residual(p, s0).sup;
  if (seed_norm > 0.0) {
    std::vector<double> taus;
    for (int kk = -20; kk <= 20; ++kk) taus.push_back(std::pow(2.0, kk / 5.0));
    for (double t1 : taus) {
      for (double t2 : taus) {
        StatePair trial = s0;
        for (double& x : trial.u1.v) x *= t1;
        for (double& x : trial.u2.v) x *= t2;
        if (state_linf(trial) < 0.1 * seed_norm) continue;  // skip the zero sink
        const double rs = stationary_residual(p, trial).sup;
        if (rs < start_res) {
          start_res = rs;
          start = std::move(trial);
        }
      }
    }
  }

  NewtonOutcome nw = coupled_newton(start, p, opt);
  return classify(std::move(nw), 0, SteadyMethod::picard_then_newton, opt);
}

OrderedUniquenessReport ordered_uniqueness_check(const StatePair& s1,
                                                 const StatePair& s2,
                                                 const Params& p, double tol,
                                                 double tol_residual) {
  check_same_grid(s1.u1, s2.u1, "ordered_uniqueness_check");
  OrderedUniquenessReport rep;

  const double r1 = steady_residual(p, s1);
  const double r2 = steady_residual(p, s2);
  if (r1 > tol_residual || r2 > tol_residual) return rep;  // not steady

  auto min_of = [](const Field& f) {
    double m = f.v[0];
    for (double x : f.v) m = std::min(m, x);
    return m;
  };
  if (min_of(s1.u1) <= 0.0 || min_of(s1.u2) <= 0.0 || min_of(s2.u1) <= 0.0 ||
      min_of(s2.u2) <= 0.0)
    return rep;  // not positive

  auto dominates = [tol](const Field& lo, const Field& hi) {
    for (std::size_t i = 0; i < lo.v.size(); ++i)
      if (lo.v[i] > hi.v[i] + tol) return false;
    return true;
  };
  const bool ordered = dominates(s1.u1, s2.u1) || dominates(s1.u2, s2.u2) ||
                       dominates(s2.u1, s1.u1) || dominates(s2.u2, s1.u2);
  if (!ordered) return rep;

  rep.applicable = true;
  double dev = 0.0;
  for (std::size_t i = 0; i < s1.u1.v.size(); ++i) {
    dev = std::max(dev, std::abs(s1.u1.v[i] - s2.u1.v[i]));
    dev = std::max(dev, std::abs(s1.u2.v[i] - s2.u2.v[i]));
  }
  rep.max_deviation = dev;
  rep.pass = dev <= tol;
  return rep;
}

}  // namespace nrrd
