#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nrrd/experiments.hpp"
#include "nrrd/norms.hpp"

using namespace nrrd;

namespace {

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

SteadyResult base_steady(int n = 201) {
  Params p;
  SolverOptions opt;
  SteadyResult s = find_positive_steady(make_interval(0.0, 1.0, n), p, 4.0, opt);
  REQUIRE(s.classification == SteadyClass::positive);
  return s;
}

}  // namespace

TEST_CASE("epsilon selection is pinned and scales as documented") {
  SteadyResult s = base_steady();
  const double eps = choose_epsilon(s.state, 1.5, 1.2, 1.0);
  CHECK(eps == doctest::Approx(0.2119795054677275).epsilon(1e-9));

  // candidate 1 (reaction margin) is the binding one here, and it is
  // proportional to a while it stays binding
  CHECK(choose_epsilon(s.state, 1.5, 1.2, 0.5) == doctest::Approx(0.5 * eps).epsilon(1e-12));

  // for huge a the boundary margin (l2 - 1)*min(u2) binds instead
  double min_u2 = s.state.u2.v[0];
  for (double x : s.state.u2.v) min_u2 = std::min(min_u2, x);
  CHECK(choose_epsilon(s.state, 1.5, 1.2, 1e6) ==
        doctest::Approx(0.5 * 0.2 * min_u2).epsilon(1e-12));

  CHECK_THROWS_AS(choose_epsilon(s.state, 1.2, 1.2, 1.0), DomainError);  // l1 == l2
  CHECK_THROWS_AS(choose_epsilon(s.state, 1.5, 0.9, 1.0), DomainError);  // l2 <= 1
  CHECK_THROWS_AS(choose_epsilon(s.state, 1.5, 1.2, 0.0), DomainError);  // a = 0
  StatePair zero{Field(s.state.grid()), Field(s.state.grid())};
  CHECK_THROWS_AS(choose_epsilon(zero, 1.5, 1.2, 1.0), DomainError);
}

TEST_CASE("robust steady search recovers from bad seed hints") {
  auto g = make_interval(0.0, 1.0, 201);
  Params p;
  SolverOptions opt;
  SteadyResult ref = find_positive_steady(g, p, 4.0, opt);

  for (double hint : {4.0, 0.05, 400.0}) {
    SteadyResult r = find_steady_robust(g, p, opt, hint);
    CHECK(r.classification == SteadyClass::positive);
    CHECK(r.residual <= 1e-9);
    CHECK(sup_diff(r.state.u1, ref.state.u1) < 1e-6);
    CHECK(sup_diff(r.state.u2, ref.state.u2) < 1e-6);
  }

  CHECK_THROWS_AS(find_steady_robust(g, p, opt, 0.0), DomainError);
  CHECK_THROWS_AS(find_steady_robust(g, p, opt, -2.0), DomainError);
}

TEST_CASE("robust search captures the superlinear boundary branch from the default hint") {
  auto g = make_interval(0.0, 1.0, 201);
  Params p;
  p.gamma = 3.0;
  SolverOptions opt;
  // the plain solver overshoots from this hint; the bracketing search recovers
  SteadyResult r = find_steady_robust(g, p, opt, default_seed_scale);
  CHECK(r.classification == SteadyClass::positive);
  CHECK(linf_norm(r.state.u1) == doctest::Approx(8.555698).epsilon(1e-5));
  CHECK(linf_norm(r.state.u2) == doctest::Approx(3.013110).epsilon(1e-5));
}

TEST_CASE("outside the certified regime the solver still reports what it finds") {
  // alpha > 2*beta with gamma = 2 is not covered by the existence condition,
  // but the discrete system here does have a positive solution; the search
  // warns on stderr and captures it
  auto g = make_interval(0.0, 1.0, 101);
  Params p;
  p.alpha = 3.0;
  SolverOptions opt;
  CHECK_FALSE(p.condition_A_or_B());
  SteadyResult r = find_steady_robust(g, p, opt, 4.0);
  CHECK(r.classification == SteadyClass::positive);
  CHECK(r.residual <= 1e-9);
}

TEST_CASE("part 1 verifies monotone bounded decay below the threshold") {
  SteadyResult s = base_steady();
  Params p;
  SolverOptions opt;
  ThresholdReport rep = run_threshold_part1(s, p, 0.5, 0.75, opt);

  CHECK(rep.l1 == 0.5);
  CHECK(rep.l2 == 0.75);
  CHECK(rep.outcome.kind == OutcomeKind::Decayed);
  CHECK(rep.monotone_decay_ok);
  CHECK(rep.bounded_ok);
  CHECK_FALSE(rep.epsilon.has_value());
  CHECK(rep.series.size() >= 3);
  CHECK(rep.y_series.size() == rep.series.size());
  CHECK(linf_norm(rep.final_state.u1) <= 1e-7);

  // the grid-only overload runs its own steady search and agrees
  ThresholdReport rep2 = run_threshold_part1(s.state.grid(), p, 0.5, 0.75, opt);
  CHECK(rep2.outcome.kind == OutcomeKind::Decayed);
  CHECK(rep2.monotone_decay_ok);

  CHECK_THROWS_AS(run_threshold_part1(s, p, 0.8, 0.5, opt), DomainError);
  CHECK_THROWS_AS(run_threshold_part1(s, p, 0.0, 0.5, opt), DomainError);
  CHECK_THROWS_AS(run_threshold_part1(s, p, 1.2, 1.5, opt), DomainError);
}

TEST_CASE("part 2 verifies blow-up with a growing subsolution above the threshold") {
  SteadyResult s = base_steady();
  Params p;
  SolverOptions opt;
  ThresholdReport rep = run_threshold_part2(s, p, 1.5, 1.2, opt);

  CHECK(rep.outcome.kind == OutcomeKind::BlowUp);
  REQUIRE(rep.epsilon.has_value());
  CHECK(*rep.epsilon == doctest::Approx(0.2119795054677275).epsilon(1e-9));
  CHECK(rep.subsolution_ok);
  CHECK(rep.y_monotone_ok);
  REQUIRE(rep.outcome.blowup_estimate.has_value());
  CHECK(*rep.outcome.blowup_estimate >= rep.outcome.t_final);
  CHECK(rep.outcome.t_final < 10.0);
  CHECK(linf_norm(rep.final_state.u2) > 1e7);

  Params p3 = p;
  p3.gamma = 3.0;
  CHECK_THROWS_AS(run_threshold_part2(s, p3, 1.5, 1.2, opt), DomainError);
  Params pa = p;
  pa.alpha = 2.5;  // alpha > 2*beta
  CHECK_THROWS_AS(run_threshold_part2(s, pa, 1.5, 1.2, opt), DomainError);
  CHECK_THROWS_AS(run_threshold_part2(s, p, 1.2, 1.5, opt), DomainError);
  CHECK_THROWS_AS(run_threshold_part2(s, p, 1.5, 0.9, opt), DomainError);
}

TEST_CASE("sweep flips outcome across the threshold and records per-row errors") {
  auto g = make_interval(0.0, 1.0, 101);
  Params p;
  SolverOptions opt;

  std::vector<SweepRow> rows =
      sweep(g, p, SweepAxis::l2, {0.5, 0.8, 1.2, 1.5}, 1.0, 1.0, opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].value == 0.5);
  CHECK(rows[3].value == 1.5);
  for (const SweepRow& r : rows) CHECK(r.error.empty());
  CHECK(rows[0].kind == OutcomeKind::Decayed);
  CHECK(rows[1].kind == OutcomeKind::Decayed);
  CHECK(rows[2].kind == OutcomeKind::BlowUp);
  CHECK(rows[3].kind == OutcomeKind::BlowUp);
  CHECK(rows[2].blowup_estimate.has_value());
  CHECK(rows[3].t_final < rows[2].t_final);  // farther above threshold, earlier blow-up
  CHECK(rows[0].peak_linf_u2 > 0.0);

  // invalid parameter values fail their own row only
  std::vector<SweepRow> bad = sweep(g, p, SweepAxis::gamma, {2.0, 1.5}, 1.2, 1.1, opt);
  REQUIRE(bad.size() == 2);
  CHECK(bad[0].error.empty());
  CHECK_FALSE(bad[1].error.empty());

  CHECK(sweep(g, p, SweepAxis::a, {}, 1.0, 1.0, opt).empty());
}

TEST_CASE("sweep axis names round-trip") {
  for (SweepAxis ax : {SweepAxis::a, SweepAxis::b, SweepAxis::alpha, SweepAxis::beta,
                       SweepAxis::gamma, SweepAxis::l1, SweepAxis::l2})
    CHECK(sweep_axis_from_name(sweep_axis_name(ax)) == ax);
  CHECK_THROWS_AS(sweep_axis_from_name("nonsense"), DomainError);
}
