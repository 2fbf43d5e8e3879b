#include <catch2/catch_amalgamated.hpp>

#include "bmolab/perimeter.hpp"

using namespace bmolab;

TEST_CASE("indicator fields: rectangle cell counts, full window, raster passthrough") {
  const IndicatorSet A = IndicatorSet::axis_rect(0.5, 0.5);
  const ScalarField f = indicator_field(A, 4, unit_box(2, 4));
  int64_t ones = 0;
  for (const Complex& v : f.values())
    if (v == Complex(1, 0)) ++ones;
  REQUIRE(ones == pow2i(2 * (4 - 1))); // 2^{2(m-1)} cells

  const IndicatorSet full = IndicatorSet::axis_rect(1.0, 1.0);
  const ScalarField g = indicator_field(full, 3, unit_box(2, 3));
  for (const Complex& v : g.values()) REQUIRE(v == Complex(1, 0));

  const IndicatorSet mask = IndicatorSet::raster_mask({{1, 0}, {0, 1}}, {0, 0, 1, 1});
  const ScalarField h = indicator_field(mask, 1, unit_box(2, 1));
  REQUIRE(h.at(0, 0) == Complex(1, 0));
  REQUIRE(h.at(1, 0) == Complex(0, 0));
  REQUIRE(h.at(0, 1) == Complex(0, 0));
  REQUIRE(h.at(1, 1) == Complex(1, 0));
}

TEST_CASE("indicator validation") {
  REQUIRE_THROWS_AS(IndicatorSet::axis_rect(0.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(IndicatorSet::raster_mask({{0.5}}, {0, 0, 1, 1}), std::invalid_argument);
  const IndicatorSet far = IndicatorSet::axis_rect(0.25, 0.25, 5.0, 5.0);
  REQUIRE_THROWS_AS(indicator_field(far, 3, unit_box(2, 3)), std::invalid_argument); // empty in this window
}

TEST_CASE("sweep: targets come from half the capped perimeter") {
  const IndicatorSet small = IndicatorSet::axis_rect(0.2, 0.2);
  REQUIRE(*small.exact_perimeter == Catch::Approx(0.8));
  const SweepResult rs = eps_sweep(small, 7, 2, 4);
  REQUIRE(*rs.target == Catch::Approx(0.4));

  const IndicatorSet big = IndicatorSet::axis_rect(1.0, 1.0); // P = 4, capped at 1
  const SweepResult rb = eps_sweep(big, 7, 2, 4);
  REQUIRE(*rb.target == Catch::Approx(0.5));
  REQUIRE(rb.caveat == std::string(kSweepCaveat));
}

TEST_CASE("sweep: values never exceed one half") {
  for (double side : {0.5, 0.3, 1.0}) {
    const SweepResult res = eps_sweep(IndicatorSet::axis_rect(side, side), 7, 2, 5);
    for (const EpsReport& er : res.per_k) REQUIRE(er.value <= 0.5 + 1e-12);
  }
}

TEST_CASE("sweep: whole-cell translation leaves certified values unchanged") {
  // The shift must stay on the candidate anchor lattice, so the check runs
  // with stride 1 and an exact solve over the (pruned) straddling cubes.
  const int m = 4;
  const IndicatorSet base = IndicatorSet::axis_rect(0.5, 0.5, 0.0, 0.0);
  const IndicatorSet moved = IndicatorSet::axis_rect(0.5, 0.5, 5.0 / 16.0, 3.0 / 16.0); // 5,3 cells
  SolverPolicy policy;
  policy.stride_override = 1;
  policy.bb_max_candidates = 400;
  policy.bb_node_limit = 20'000'000;
  for (int k = 2; k <= 3; ++k) {
    const GridBox wb = sweep_window(base, m);
    const GridBox wm = sweep_window(moved, m);
    const ScalarField fb = indicator_field(base, m, wb);
    const ScalarField fm = indicator_field(moved, m, wm);
    PrefixTable pb(fb), pm(fm);
    const EpsReport rb = eps_functional(fb, pb, k, policy);
    const EpsReport rm = eps_functional(fm, pm, k, policy);
    REQUIRE(rb.optimal);
    REQUIRE(rm.optimal);
    REQUIRE(rb.value == rm.value); // exact solver, identical translated instance
  }
}

TEST_CASE("sweep: doubling a small rectangle's perimeter doubles the target") {
  const SweepResult a = eps_sweep(IndicatorSet::axis_rect(0.1, 0.1), 7, 2, 3);
  const SweepResult b = eps_sweep(IndicatorSet::axis_rect(0.2, 0.2), 7, 2, 3);
  REQUIRE(*b.target == Catch::Approx(2.0 * *a.target));
}

TEST_CASE("sweep: k range validation") {
  const IndicatorSet A = IndicatorSet::axis_rect(0.5, 0.5);
  REQUIRE_THROWS_AS(eps_sweep(A, 5, 0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(eps_sweep(A, 5, 3, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(eps_sweep(A, 5, 2, 9), std::invalid_argument);
}

TEST_CASE("sweep: coarse run converges toward the target on a small grid") {
  const SweepResult res = eps_sweep(IndicatorSet::axis_rect(0.5, 0.5), 8, 2, 5);
  double prev = 0.0;
  for (const EpsReport& er : res.per_k) {
    REQUIRE(er.value >= prev * 0.98);
    prev = std::max(prev, er.value);
  }
  REQUIRE(std::abs(res.per_k.back().value - *res.target) / *res.target < 0.10);
}
