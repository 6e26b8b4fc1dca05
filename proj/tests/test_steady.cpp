#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nrrd/norms.hpp"
#include "nrrd/steady.hpp"

using namespace nrrd;

namespace {

// Independent reference for the 1d stationary system on (0,1): shooting with
// classical RK4 on
//   u1'' = b*u1 - u1*u2,   u2'' = -a*u1
// from left-boundary data (u1(0), u2(0)) closed by the left conditions
//   u1'(0) = alpha*u1(0),  u2'(0) = beta*u2(0)^(gamma-1),
// Newton-matched to the right conditions
//   u1'(1) + alpha*u1(1) = 0,  u2'(1) + beta*u2(1)^(gamma-1) = 0.
struct Shot {
  std::vector<double> u1, u2;  // values at the requested sample nodes
  std::array<double, 2> end_defect{};
};

Shot integrate_shot(double s1, double s2, const Params& p, int steps, int record_every) {
  std::array<double, 4> y{s1, p.alpha * s1, s2,
                          p.beta * std::pow(s2, p.gamma - 1.0)};
  auto rhs = [&](const std::array<double, 4>& w) {
    return std::array<double, 4>{w[1], p.b * w[0] - w[0] * w[2], w[3], -p.a * w[0]};
  };
  const double h = 1.0 / steps;
  Shot out;
  out.u1.push_back(y[0]);
  out.u2.push_back(y[2]);
  for (int k = 0; k < steps; ++k) {
    const auto k1 = rhs(y);
    std::array<double, 4> t;
    for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(t);
    for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(t);
    for (int i = 0; i < 4; ++i) t[i] = y[i] + h * k3[i];
    const auto k4 = rhs(t);
    for (int i = 0; i < 4; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if ((k + 1) % record_every == 0) {
      out.u1.push_back(y[0]);
      out.u2.push_back(y[2]);
    }
  }
  out.end_defect = {y[1] + p.alpha * y[0],
                    y[3] + p.beta * std::pow(std::max(y[2], 0.0), p.gamma - 1.0)};
  return out;
}

// Newton on the two left values; returns samples at n equally spaced nodes.
Shot shoot_steady(const Params& p, int n, double s1_start, double s2_start) {
  const int steps = 8 * (n - 1);
  double s1 = s1_start, s2 = s2_start;
  for (int it = 0; it < 60; ++it) {
    const Shot base = integrate_shot(s1, s2, p, steps, 8);
    const double r0 = base.end_defect[0], r1 = base.end_defect[1];
    if (std::max(std::abs(r0), std::abs(r1)) < 1e-11) return base;
    const double e1 = 1e-7 * (1.0 + std::abs(s1));
    const double e2 = 1e-7 * (1.0 + std::abs(s2));
    const Shot d1 = integrate_shot(s1 + e1, s2, p, steps, 8);
    const Shot d2 = integrate_shot(s1, s2 + e2, p, steps, 8);
    const double j00 = (d1.end_defect[0] - r0) / e1, j01 = (d2.end_defect[0] - r0) / e2;
    const double j10 = (d1.end_defect[1] - r1) / e1, j11 = (d2.end_defect[1] - r1) / e2;
    const double det = j00 * j11 - j01 * j10;
    REQUIRE(std::abs(det) > 1e-14);
    s1 -= (j11 * r0 - j01 * r1) / det;
    s2 -= (-j10 * r0 + j00 * r1) / det;
  }
  FAIL("shooting oracle did not converge");
  return {};
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("positive steady state matches an independent shooting oracle") {
  Params p;
  SolverOptions opt;

  auto solve_err = [&](int n, const Shot& oracle_n) {
    auto g = make_interval(0.0, 1.0, n);
    SteadyResult r = find_positive_steady(g, p, 4.0, opt);
    REQUIRE(r.classification == SteadyClass::positive);
    return std::max(sup_diff(r.state.u1.v, oracle_n.u1),
                    sup_diff(r.state.u2.v, oracle_n.u2));
  };

  const Shot coarse = shoot_steady(p, 101, 3.9, 2.3);
  const Shot fine = shoot_steady(p, 201, 3.9, 2.3);
  const double ec = solve_err(101, coarse);
  const double ef = solve_err(201, fine);
  CHECK(ef < 5e-4);
  CHECK(ec / ef == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("reference steady quantities stay pinned") {
  Params p;
  SolverOptions opt;
  auto g = make_interval(0.0, 1.0, 201);
  SteadyResult r = find_positive_steady(g, p, 4.0, opt);

  CHECK(r.classification == SteadyClass::positive);
  CHECK(r.residual <= 1e-10);
  CHECK(r.iterations < 200);
  CHECK(linf_norm(r.state.u1) == doctest::Approx(4.947280482099991).epsilon(1e-9));
  CHECK(linf_norm(r.state.u2) == doctest::Approx(2.884733918144741).epsilon(1e-9));

  double mn1 = r.state.u1.v[0], mn2 = r.state.u2.v[0];
  for (std::size_t i = 0; i < g->size(); ++i) {
    mn1 = std::min(mn1, r.state.u1.v[i]);
    mn2 = std::min(mn2, r.state.u2.v[i]);
    // even data, even domain: the profile is symmetric about the midpoint
    CHECK(r.state.u1.v[i] == doctest::Approx(r.state.u1.v[g->size() - 1 - i]).epsilon(1e-9));
  }
  CHECK(mn1 > 0.0);
  CHECK(mn2 > 0.0);
}

TEST_CASE("restarting from rescaled states lands on the same solution") {
  Params p;
  SolverOptions opt;
  auto g = make_interval(0.0, 1.0, 151);
  SteadyResult base = find_positive_steady(g, p, 4.0, opt);
  REQUIRE(base.classification == SteadyClass::positive);

  for (double scale : {0.5, 2.0}) {
    StatePair seed = base.state;
    for (double& x : seed.u1.v) x *= scale;
    for (double& x : seed.u2.v) x *= scale;
    SteadyResult again = find_positive_steady(seed, p, opt);
    REQUIRE(again.classification == SteadyClass::positive);
    CHECK(sup_diff(again.state.u1.v, base.state.u1.v) < 1e-6);
    CHECK(sup_diff(again.state.u2.v, base.state.u2.v) < 1e-6);

    OrderedUniquenessReport rep =
        ordered_uniqueness_check(base.state, again.state, p, 1e-6);
    CHECK(rep.applicable);
    CHECK(rep.pass);
    CHECK(rep.max_deviation < 1e-6);
  }
}

TEST_CASE("rescaled states are far from solving the system") {
  Params p;
  SolverOptions opt;
  auto g = make_interval(0.0, 1.0, 151);
  SteadyResult base = find_positive_steady(g, p, 4.0, opt);

  StatePair half = base.state;
  for (double& x : half.u1.v) x *= 0.5;
  for (double& x : half.u2.v) x *= 0.5;
  CHECK(steady_residual(p, half) > 1e-2);

  // a non-steady input makes the ordered-uniqueness check inapplicable
  OrderedUniquenessReport rep = ordered_uniqueness_check(base.state, half, p, 1e-6);
  CHECK_FALSE(rep.applicable);

  StatePair zero{Field(base.state.grid()), Field(base.state.grid())};
  CHECK(steady_residual(p, zero) == 0.0);
}

TEST_CASE("power law boundary branch is captured from an adequate seed") {
  Params p;
  p.gamma = 3.0;
  SolverOptions opt;
  auto g = make_interval(0.0, 1.0, 201);
  SteadyResult r = find_positive_steady(g, p, 8.0, opt);
  CHECK(r.classification == SteadyClass::positive);
  CHECK(r.residual <= 5e-10);
  CHECK(linf_norm(r.state.u1) == doctest::Approx(8.555698).epsilon(1e-5));
  CHECK(linf_norm(r.state.u2) == doctest::Approx(3.013110).epsilon(1e-5));

  // and it agrees with the shooting oracle as well
  const Shot oracle = shoot_steady(p, 201, r.state.u1.v[0], r.state.u2.v[0]);
  CHECK(sup_diff(r.state.u1.v, oracle.u1) < 2e-3);
  CHECK(sup_diff(r.state.u2.v, oracle.u2) < 2e-3);
}

TEST_CASE("zero and small seeds collapse to the trivial state") {
  Params p;
  SolverOptions opt;
  auto g = make_interval(0.0, 1.0, 101);

  SteadyResult z = find_positive_steady(g, p, 0.0, opt);
  CHECK(z.classification == SteadyClass::trivial_zero);
  CHECK(linf_norm(z.state.u1) == 0.0);
  CHECK(linf_norm(z.state.u2) == 0.0);

  SteadyResult small = find_positive_steady(g, p, 0.05, opt);
  CHECK(small.classification == SteadyClass::trivial_zero);
  CHECK(linf_norm(small.state.u1) <= 1e-8);
}

TEST_CASE("2d steady state is positive and symmetric") {
  Params p;
  SolverOptions opt;
  auto g = make_rectangle(0.0, 1.0, 41, 0.0, 1.0, 41);
  SteadyResult r = find_positive_steady(g, p, 16.0, opt);
  CHECK(r.classification == SteadyClass::positive);
  CHECK(r.residual <= 1e-9);
  CHECK(linf_norm(r.state.u1) == doctest::Approx(17.382241133).epsilon(1e-6));
  CHECK(linf_norm(r.state.u2) == doctest::Approx(5.015827808).epsilon(1e-6));

  for (int iy = 0; iy < 41; ++iy)
    for (int ix = 0; ix < 41; ++ix) {
      const double a = r.state.u1.v[g->index(ix, iy)];
      CHECK(a > 0.0);
      CHECK(a == doctest::Approx(r.state.u1.v[g->index(40 - ix, iy)]).epsilon(1e-7));
      CHECK(a == doctest::Approx(r.state.u1.v[g->index(iy, ix)]).epsilon(1e-7));
    }
}

TEST_CASE("seed scale is validated") {
  Params p;
  SolverOptions opt;
  auto g = make_interval(0.0, 1.0, 31);
  CHECK_THROWS_AS(find_positive_steady(g, p, -1.0, opt), DomainError);
  CHECK_THROWS_AS(find_positive_steady(g, p, std::nan(""), opt), DomainError);
}
