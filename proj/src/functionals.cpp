#include "nrrd/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nrrd/errors.hpp"

namespace nrrd {

double weighted_mass(const Field& f, const Field& phi1) {
  check_same_grid(f, phi1, "weighted_mass");
  const Grid& g = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += g.wq[i] * f.v[i] * phi1.v[i];
  return acc;
}

double weighted_boundary(const Field& f, double p, const Field& phi1) {
  check_same_grid(f, phi1, "weighted_boundary");
  if (!std::isfinite(p) || p < 1.0)
    throw DomainError("weighted_boundary: exponent must satisfy p >= 1");
  const Grid& g = *f.grid;
  double acc = 0.0;
  for (int i : g.bnodes) {
    const double fv = f.v[i];
    if (fv < 0.0)
      throw DomainError("weighted_boundary: negative value on the boundary");
    acc += g.bweight[i] * std::pow(fv, p) * phi1.v[i];
  }
  return acc;
}

void BracketParams::validate() const {
  if (!std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(alpha) ||
      !std::isfinite(shift))
    throw DomainError("bracket: parameters must be finite");
  if (beta <= 0.0) throw DomainError("bracket: beta must be positive");
  if (gamma < 2.0) throw DomainError("bracket: gamma must be >= 2");
  if (alpha < 0.0) throw DomainError("bracket: alpha must be nonnegative");
  if (shift <= 0.0) throw DomainError("bracket: shift must be positive");
}

namespace {

double bracket_g(const BracketParams& bp, double s) {
  return bp.beta * std::pow(s, bp.gamma) -
         bp.beta * bp.shift * std::pow(s, bp.gamma - 1.0) -
         0.5 * bp.alpha * s * s + bp.alpha * bp.shift * s;
}

// golden-section minimization of g on [lo, hi]
double golden_min(const BracketParams& bp, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = bracket_g(bp, c), fd = bracket_g(bp, d);
  while (b - a > 1e-10 * (1.0 + b)) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = bracket_g(bp, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = bracket_g(bp, d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

BracketResult bracket_infimum(const BracketParams& bp) {
  bp.validate();
  const double s0 = bp.shift;

  if (bp.gamma == 2.0) {
    // g(s) = (beta - alpha/2) s^2 + (alpha - beta) s0 s
    const double A = bp.beta - 0.5 * bp.alpha;
    const double B = (bp.alpha - bp.beta) * s0;
    if (A < 0.0)
      return {false, -std::numeric_limits<double>::infinity(), 0.0};
    if (A == 0.0) {
      // linear; B = beta*s0 > 0 here, but handle the general sign anyway
      if (B < 0.0)
        return {false, -std::numeric_limits<double>::infinity(), 0.0};
      return {true, 0.0, 0.0};
    }
    const double s_star = -B / (2.0 * A);
    if (s_star <= 0.0) return {true, 0.0, 0.0};
    return {true, -B * B / (4.0 * A), s_star};
  }

  // gamma > 2: the leading beta*s^gamma term dominates, so the infimum is
  // finite and attained on a bounded interval.
  double s_max =
      std::max(1.0, std::pow(2.0 * s0, std::max(1.0, 1.0 / (bp.gamma - 2.0))));
  for (int k = 0; k < 60; ++k) {
    // grow until the right edge is clearly uphill
    if (bracket_g(bp, s_max) > bracket_g(bp, 0.5 * s_max) &&
        bracket_g(bp, s_max) > 0.0)
      break;
    s_max *= 2.0;
  }

  const int nscan = 4096;
  double best_s = 0.0, best_g = bracket_g(bp, 0.0);
  for (int i = 1; i <= nscan; ++i) {
    const double s = s_max * static_cast<double>(i) / nscan;
    const double gs = bracket_g(bp, s);
    if (gs < best_g) {
      best_g = gs;
      best_s = s;
    }
  }
  const double h = s_max / nscan;
  const double lo = std::max(0.0, best_s - h);
  const double hi = std::min(s_max, best_s + h);
  const double s_star = golden_min(bp, lo, hi);
  const double g_star = bracket_g(bp, s_star);
  if (g_star <= best_g) return {true, g_star, s_star};
  return {true, best_g, best_s};
}

namespace {

// validates uniform sampling and returns the common spacing
double series_spacing(const TimeSeries& s) {
  if (s.size() < 3)
    throw DomainError("mass balance residual: need at least three samples");
  const double dt0 = s[1].t - s[0].t;
  if (!(dt0 > 0.0))
    throw DomainError("mass balance residual: times must be increasing");
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double d = s[k + 1].t - s[k].t;
    if (std::abs(d - dt0) > 1e-9 * dt0)
      throw DomainError("mass balance residual: samples must be uniform");
  }
  return dt0;
}

}  // namespace

double mass_balance_residual_u1(const TimeSeries& s, const Params& p,
                                double lambda1) {
  const double dt = series_spacing(s);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double dm = (s[k + 1].mass_u1 - s[k - 1].mass_u1) / (2.0 * dt);
    const double defect =
        dm + (p.b + lambda1) * s[k].mass_u1 - s[k].mass_u1u2;
    worst = std::max(worst, std::abs(defect));
  }
  return worst;
}

double mass_balance_residual_u2(const TimeSeries& s, const Params& p,
                                double lambda1) {
  if (p.gamma != 2.0)
    throw DomainError("mass balance residual for u2 requires gamma == 2");
  const double dt = series_spacing(s);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double dm = (s[k + 1].mass_u2 - s[k - 1].mass_u2) / (2.0 * dt);
    const double defect = dm + lambda1 * s[k].mass_u2 +
                          (p.beta - p.alpha) * s[k].bnd_u2 -
                          p.a * s[k].mass_u1;
    worst = std::max(worst, std::abs(defect));
  }
  return worst;
}

}  // namespace nrrd
