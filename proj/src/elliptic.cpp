#include "nrrd/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nrrd/norms.hpp"
#include "nrrd/operators.hpp"

namespace nrrd {

namespace {

double sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Residual r = f - A*v in place.
void residual(const EllipticOperator& a, const std::vector<double>& f,
              const std::vector<double>& v, std::vector<double>& r) {
  a.apply(v, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = f[i] - r[i];
}

}  // namespace

Field solve_linear_robin(GridPtr grid, double c, double alpha, const Field& f,
                         const SolverOptions& opt) {
  if (!(std::isfinite(c) && c >= 0.0)) throw DomainError("linear robin: c must be >= 0");
  if (!(std::isfinite(alpha) && alpha >= 0.0))
    throw DomainError("linear robin: alpha must be >= 0");
  check_finite(f, "linear robin rhs");
  opt.validate();

  const double fscale = 1.0 + linf_norm(f);

  if (c == 0.0 && alpha == 0.0) {
    // Pure Neumann: solvable only for zero-mean sources.
    const double mean = integrate(f) / grid->measure();
    if (std::abs(mean) > 1e-10 * fscale)
      throw SolvabilityError("linear robin: c = alpha = 0 needs a zero-mean source");
    EllipticOperator a(grid, 1.0);
    std::vector<double> b = f.v;
    for (double& x : b) x -= mean;
    // Unpreconditioned CG keeps the iterates orthogonal to the constant
    // null vector (A maps onto zero-mean vectors exactly).
    Field out(grid);
    pcg_solve([&a](const std::vector<double>& p, std::vector<double>& q) { a.apply(p, q); },
              std::vector<double>(grid->size(), 1.0), grid->wq, b, out.v,
              1e-12 * fscale, 200 * static_cast<int>(grid->size()));
    const double vmean = integrate(out) / grid->measure();
    for (double& x : out.v) x -= vmean;
    return out;
  }

  EllipticOperator a(grid, 1.0);
  for (std::size_t i = 0; i < a.d.size(); ++i)
    a.d[i] = c + alpha * grid->closure[i];

  Field out(grid);
  out.v = a.solve(f.v, 1e-12 * fscale, 100 * static_cast<int>(grid->size()));

  // Iterative refinement: a single banded backsolve is accurate to
  // eps*||A||*||v||, which on fine grids can exceed the residual contract.
  std::vector<double> r(grid->size()), dv;
  for (int round = 0; round < 3; ++round) {
    residual(a, f.v, out.v, r);
    if (sup(r) <= 1e-12 * fscale) break;
    dv = a.solve(r, 1e-12 * fscale, 100 * static_cast<int>(grid->size()));
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += dv[i];
  }
  residual(a, f.v, out.v, r);
  if (sup(r) > 1e-10 * fscale)
    throw ConvergenceError("linear robin: residual contract not met");
  return out;
}

Field solve_poisson_nonlinear_bc(GridPtr grid, double beta, double gamma,
                                 const Field& f, const SolverOptions& opt,
                                 std::vector<double>* residual_history) {
  if (!(std::isfinite(beta) && beta > 0.0))
    throw DomainError("nonlinear bc: beta must be > 0");
  if (!(std::isfinite(gamma) && gamma >= 2.0))
    throw DomainError("nonlinear bc: gamma must be >= 2");
  check_finite(f, "nonlinear bc rhs");
  for (double x : f.v)
    if (x < 0.0) throw DomainError("nonlinear bc: source must be nonnegative");
  opt.validate();

  // Start from the gamma = 2 linearization; for gamma = 2 it is the answer.
  Field v = solve_linear_robin(grid, 0.0, beta, f, opt);
  if (gamma == 2.0) return v;

  const double fscale = 1.0 + linf_norm(f);
  const double tol = opt.newton_tol * fscale;
  const std::size_t n = grid->size();

  EllipticOperator a0(grid, 1.0);  // reflection Laplacian, no zero-order part
  const auto bterm = [&](double val, int idx) {
    return beta * grid->closure[idx] * std::pow(std::max(val, 0.0), gamma - 1.0);
  };
  const auto bslope = [&](double val, int idx) {
    return beta * grid->closure[idx] * (gamma - 1.0) *
           std::pow(std::max(val, 0.0), gamma - 2.0);
  };
  const auto eval_residual = [&](const std::vector<double>& w, std::vector<double>& r) {
    a0.apply(w, r);
    for (int i : grid->bnodes) r[i] += bterm(w[i], i);
    for (std::size_t i = 0; i < n; ++i) r[i] -= f.v[i];
  };

  // Evaluating the residual applies the stiff Laplacian rows, so its own
  // rounding noise is eps * ||diag|| * ||v||; the exit test cannot demand
  // more than that.
  double diag_max = 0.0;
  for (double x : a0.diagonal()) diag_max = std::max(diag_max, x);
  const double eps_floor =
      2.0 * std::numeric_limits<double>::epsilon() * diag_max;
  const auto converged = [&](double rn, const std::vector<double>& w) {
    return rn <= tol || rn <= eps_floor * std::max(1.0, sup(w));
  };

  std::vector<double> r(n), rt(n), delta, trial(n);
  eval_residual(v.v, r);
  double rnorm = sup(r);
  if (residual_history) residual_history->push_back(rnorm);

  constexpr double levenberg_mu = 1e-8;
  int stalled = 0;
  for (int it = 0; it < 100; ++it) {
    if (converged(rnorm, v.v)) return v;

    EllipticOperator jac(grid, 1.0);
    for (int i : grid->bnodes) jac.d[i] = bslope(v.v[i], i) + levenberg_mu;
    for (double& x : r) x = -x;
    delta = jac.solve(r, 1e-12 * fscale, 100 * static_cast<int>(n));

    // Backtracking on the sup-norm residual.
    double t = 1.0;
    double rtnorm = rnorm;
    for (int cut = 0; cut < 40; ++cut, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = v.v[i] + t * delta[i];
      eval_residual(trial, rt);
      rtnorm = sup(rt);
      if (rtnorm < rnorm) break;
    }
    stalled = rtnorm < rnorm ? 0 : stalled + 1;
    v.v = trial;
    r = rt;
    rnorm = rtnorm;
    if (residual_history) residual_history->push_back(rnorm);
    if (stalled >= 3) break;  // at the floating-point floor
  }
  if (converged(rnorm, v.v) || rnorm <= 1e-10 * fscale) return v;
  throw ConvergenceError("nonlinear bc: Newton residual tolerance not reached");
}

StatePair psi_map(const StatePair& u, const Params& p, const SolverOptions& opt) {
  p.validate();
  check_finite(u.u1, "psi u1");
  check_finite(u.u2, "psi u2");
  for (double x : u.u1.v)
    if (x < 0.0) throw DomainError("psi: u1 must be nonnegative");

  Field rhs1(u.grid());
  for (std::size_t i = 0; i < rhs1.size(); ++i) rhs1[i] = u.u1[i] * u.u2[i];
  Field v1 = solve_linear_robin(u.grid(), p.b, p.alpha, rhs1, opt);

  Field rhs2(u.grid());
  for (std::size_t i = 0; i < rhs2.size(); ++i) rhs2[i] = p.a * u.u1[i];
  Field v2 = solve_poisson_nonlinear_bc(u.grid(), p.beta, p.gamma, rhs2, opt);

  return {std::move(v1), std::move(v2), u.t};
}

}  // namespace nrrd
