#include <catch2/catch_amalgamated.hpp>

#include "bmolab/calibration.hpp"
#include "bmolab/generators.hpp"
#include "bmolab/norms.hpp"
#include "support/oracles.hpp"

using namespace bmolab;

namespace {

double exhaustive_eps(const ScalarField& f, int k) {
  PrefixTable pre(f);
  PackingInstance inst;
  inst.budget = eps_budget(f.dim(), k);
  inst.candidates = enumerate_candidates(f.box(), k, 1);
  for (const Cube& q : inst.candidates) inst.weights.push_back(mean_oscillation(f, pre, q));
  const double prefactor = f.dim() == 1 ? 1.0 : std::ldexp(1.0, -k * (f.dim() - 1));
  return prefactor * testing::exhaustive_best(inst);
}

} // namespace

TEST_CASE("mean oscillation: constants, two-value identity, random oracle") {
  CatalogParams pc;
  pc.num["c_re"] = 4.0;
  pc.num["c_im"] = 1.0;
  const ScalarField cf = sample_catalog("constant", pc, 2, 4, unit_box(2, 4));
  PrefixTable pre_c(cf);
  Cube q;
  q.dim = 2;
  q.scale_exp = 2;
  q.resolution_exp = 4;
  q.anchor = {4, 4};
  REQUIRE(mean_oscillation(cf, pre_c, q) == 0.0);

  // indicator occupying fraction p of Q has M = 2p(1-p)
  CatalogParams pi;
  pi.num["x0"] = 0;
  pi.num["y0"] = 0;
  pi.num["w"] = 0.5;
  pi.num["h"] = 1.0;
  const ScalarField half = sample_catalog("rect_indicator", pi, 2, 4, unit_box(2, 4));
  PrefixTable pre_h(half);
  Cube q0cube;
  q0cube.dim = 2;
  q0cube.scale_exp = 0;
  q0cube.resolution_exp = 4;
  q0cube.anchor = {0, 0};
  REQUIRE(mean_oscillation(half, pre_h, q0cube) == Catch::Approx(0.5).margin(1e-15));

  CatalogParams pe;
  const ScalarField eta = sample_catalog("checkerboard_eta", pe, 2, 5, unit_box(2, 5));
  PrefixTable pre_e(eta);
  Cube unit;
  unit.dim = 2;
  unit.scale_exp = 0;
  unit.resolution_exp = 5;
  unit.anchor = {0, 0};
  REQUIRE(mean_oscillation(eta, pre_e, unit) == Catch::Approx(0.375).margin(1e-15)); // p = 1/4

  Rng rng(5);
  const ScalarField f = random_field(rng, 2, 5, unit_box(2, 5));
  PrefixTable pre(f);
  for (int t = 0; t < 100; ++t) {
    const int k = static_cast<int>(rng.range(1, 5));
    const int64_t side = pow2i(5 - k);
    Cube c;
    c.dim = 2;
    c.scale_exp = k;
    c.resolution_exp = 5;
    c.anchor = {rng.range(0, 32 - side), rng.range(0, 32 - side)};
    const double got = mean_oscillation(f, pre, c);
    const double want = testing::oscillation_two_pass(f, c);
    REQUIRE(got == Catch::Approx(want).margin(1e-12 * (1.0 + want)));
  }
}

TEST_CASE("eps functional: constants vanish, indicator equals exhaustive search") {
  CatalogParams pc;
  pc.num["c"] = 2.5;
  const ScalarField cf = sample_catalog("constant", pc, 2, 3, unit_box(2, 3));
  for (int k = 1; k <= 3; ++k) REQUIRE(eps_functional(cf, k).value == 0.0);

  CatalogParams pi;
  pi.num["x0"] = 0;
  pi.num["y0"] = 0;
  pi.num["w"] = 0.5;
  pi.num["h"] = 0.5;
  const ScalarField ind = sample_catalog("rect_indicator", pi, 2, 3, unit_box(2, 3));
  SolverPolicy policy;
  policy.stride_override = 1; // full anchor set
  const EpsReport rep = eps_functional(ind, 2, policy);
  REQUIRE(rep.optimal);
  REQUIRE(rep.value == Catch::Approx(exhaustive_eps(ind, 2)).margin(1e-12));
}

TEST_CASE("eps functional: n=1 equals the best single interval at every scale") {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const ScalarField f = random_field(rng, 1, 6, unit_box(1, 6));
    PrefixTable pre(f);
    const SolverPolicy policy;
    for (int k = 1; k <= 6; ++k) {
      const EpsReport rep = eps_functional(f, pre, k, policy);
      REQUIRE(rep.method == SolveMethod::exact_1d);
      REQUIRE(rep.family.budget == 1);
      double best = 0.0;
      for (const Cube& q : enumerate_candidates(f.box(), k, policy.stride_for(6, k)))
        best = std::max(best, mean_oscillation(f, pre, q));
      REQUIRE(std::abs(rep.value - best) <= 1e-12);
    }
  }
}

TEST_CASE("eps functional: certificate recomputes from the reported family") {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const ScalarField f = random_field(rng, 2, 5, unit_box(2, 5));
    PrefixTable pre(f);
    for (int k = 1; k <= 5; ++k) {
      const EpsReport rep = eps_functional(f, pre, k);
      const double recomputed = family_value(f, pre, k, rep.family.cubes);
      REQUIRE(rep.value == Catch::Approx(recomputed).margin(1e-12 * (1.0 + recomputed)));
      REQUIRE(static_cast<int64_t>(rep.family.cubes.size()) <= rep.family.budget);
      rep.family.validate();
    }
  }
}

TEST_CASE("solver dominance: exact >= shifted tiling >= aligned tiling") {
  Rng rng(31);
  for (int t = 0; t < 25; ++t) {
    const ScalarField f = random_field(rng, 2, 4, unit_box(2, 4));
    PrefixTable pre(f);
    const int k = static_cast<int>(rng.range(1, 2));
    const int64_t K = eps_budget(2, k);
    const int64_t side = pow2i(4 - k);
    const auto weight = [&](const Cube& q) { return mean_oscillation(f, pre, q); };
    const PackingSolution tile = solve_tiling(f.box(), k, K, {{0, 0}}, weight);
    const PackingSolution shifted =
        solve_tiling(f.box(), k, K, {{0, 0}, {side / 2, 0}, {0, side / 2}, {side / 2, side / 2}}, weight);
    SolverPolicy policy;
    policy.stride_override = std::max<int64_t>(1, side / 4);
    const EpsReport exact = eps_functional(f, pre, k, policy);
    REQUIRE(exact.optimal);
    const double prefactor = std::ldexp(1.0, -k);
    REQUIRE(shifted.value >= tile.value - 1e-12);
    REQUIRE(exact.value >= prefactor * shifted.value - 1e-12);
  }
}

TEST_CASE("seminorm subadditivity on a shared exact candidate set") {
  Rng rng(41);
  for (int t = 0; t < 15; ++t) {
    const ScalarField f = random_field(rng, 2, 4, unit_box(2, 4));
    const ScalarField g = random_field(rng, 2, 4, unit_box(2, 4));
    const ScalarField sum = field_linear({1, 0}, f, {1, 0}, g);
    SolverPolicy policy;
    policy.stride_override = 2;
    for (int k = 1; k <= 2; ++k) {
      const EpsReport rf = eps_functional(f, k, policy);
      const EpsReport rg = eps_functional(g, k, policy);
      const EpsReport rs = eps_functional(sum, k, policy);
      REQUIRE(rf.optimal);
      REQUIRE(rg.optimal);
      REQUIRE(rs.optimal);
      REQUIRE(rs.value <= rf.value + rg.value + 1e-12);
    }
  }
}

TEST_CASE("per-family boundedness by the max oscillation") {
  Rng rng(51);
  const ScalarField f = random_field(rng, 2, 5, unit_box(2, 5));
  PrefixTable pre(f);
  for (int k = 1; k <= 5; ++k) {
    const EpsReport rep = eps_functional(f, pre, k);
    double max_m = 0.0;
    for (const Cube& q : enumerate_candidates(f.box(), k, 1)) max_m = std::max(max_m, mean_oscillation(f, pre, q));
    REQUIRE(rep.value <= max_m + 1e-12);
  }
}

TEST_CASE("b_norm: zero, constant, and family recomputation") {
  CatalogParams p0;
  p0.num["c"] = 0.0;
  REQUIRE(b_norm(sample_catalog("constant", p0, 2, 4, unit_box(2, 4)), NormMode::q0).total == 0.0);

  CatalogParams pc;
  pc.num["c_re"] = -3.0;
  const NormReport rc = b_norm(sample_catalog("constant", pc, 2, 4, unit_box(2, 4)), NormMode::q0);
  REQUIRE(rc.l1_term == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(rc.sup_eps == 0.0);
  REQUIRE(rc.total == Catch::Approx(3.0).margin(1e-12));

  CatalogParams pe;
  const ScalarField eta = sample_catalog("checkerboard_eta", pe, 2, 4, unit_box(2, 4));
  PrefixTable pre(eta);
  const NormReport re = b_norm(eta, NormMode::q0, {}, &pre);
  double sup = 0.0;
  for (const EpsReport& er : re.per_k) sup = std::max(sup, family_value(eta, pre, er.k, er.family.cubes));
  REQUIRE(re.total == Catch::Approx(re.l1_term + sup).margin(1e-12));
}

TEST_CASE("b_norm: rn_window requires a unit margin") {
  CatalogParams pi;
  pi.num["x0"] = 0;
  pi.num["y0"] = 0;
  pi.num["w"] = 1.0;
  pi.num["h"] = 1.0;
  const ScalarField snug = sample_catalog("rect_indicator", pi, 2, 4, unit_window(2, 4, {0, 0}, {2, 2}));
  REQUIRE_THROWS_AS(b_norm(snug, NormMode::rn_window), std::invalid_argument);
  const ScalarField padded = sample_catalog("rect_indicator", pi, 2, 4, unit_window(2, 4, {-1, -1}, {3, 3}));
  REQUIRE_NOTHROW(b_norm(padded, NormMode::rn_window));
  REQUIRE_THROWS_AS(b_norm(padded, NormMode::q0), std::invalid_argument); // not a unit-cube box
}

TEST_CASE("bmo: constants, the half interval, and bmo_small") {
  CatalogParams pc;
  pc.num["c"] = 9.0;
  REQUIRE(bmo_norms(sample_catalog("constant", pc, 2, 4, unit_box(2, 4)), BmoFlavor::bmo_q0) == 0.0);

  CatalogParams pi;
  pi.num["x0"] = 0;
  pi.num["w"] = 0.5;
  const ScalarField half = sample_catalog("rect_indicator", pi, 1, 5, unit_box(1, 5));
  REQUIRE(bmo_norms(half, BmoFlavor::bmo_q0) == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(bmo_norms(half, BmoFlavor::bmo_small) == Catch::Approx(1.0).margin(1e-15)); // + unit integral 1/2
}

TEST_CASE("decay profile: smooth bump vanishes, log singularity does not") {
  CatalogParams pb;
  pb.num["j"] = 4;
  pb.num["scale"] = 0.5;
  pb.num["base_x"] = 0.5;
  pb.num["base_y"] = 0.5;
  const ScalarField bump = sample_catalog("phi_bump_array", pb, 2, 6, unit_box(2, 6));
  const DecayProfile dp = decay_profile(bump);
  const double lip = profile::theta_j_lipschitz(4, 0.5);
  for (const EpsReport& er : dp.per_k) {
    // analytic modulus bound: M(f,Q) <= L * sqrt(n) * eps for Lipschitz f
    REQUIRE(er.value <= lip * std::sqrt(2.0) * std::ldexp(1.0, -er.k) + 1e-12);
  }
  for (size_t i = 1; i < dp.tail_sup.size(); ++i) REQUIRE(dp.tail_sup[i] <= dp.tail_sup[i - 1] + 1e-15);

  // n=1 log singularity: the functional is a sup of interval oscillations,
  // which stays of unit size at every scale near the singular point.
  CatalogParams pl;
  const ScalarField logf = sample_catalog("log_singularity", pl, 1, 8, unit_box(1, 8));
  const DecayProfile dl = decay_profile(logf);
  for (const EpsReport& er : dl.per_k)
    if (er.k < 8) REQUIRE(er.value >= calibration::kLogSingularityFloor);

  CatalogParams pc;
  pc.num["c"] = 1.0;
  const DecayProfile dc = decay_profile(sample_catalog("constant", pc, 2, 5, unit_box(2, 5)));
  for (const EpsReport& er : dc.per_k) REQUIRE(er.value == 0.0);
}

TEST_CASE("uniform average: identity field saturates at 2^-k0") {
  CatalogParams pc;
  pc.num["c"] = 1.0;
  const ScalarField ones = sample_catalog("constant", pc, 2, 5, unit_box(2, 5));
  PrefixTable pre(ones);
  const double norm = b_norm(ones, NormMode::q0, {}, &pre).total;
  REQUIRE(norm == Catch::Approx(1.0).margin(1e-12));
  for (int k0 = 1; k0 <= 3; ++k0) {
    CubeFamily fam;
    fam.budget = eps_budget(2, k0);
    const auto tiles = enumerate_candidates(ones.box(), k0, pow2i(5 - k0));
    for (int64_t i = 0; i < fam.budget; ++i) fam.cubes.push_back(tiles[static_cast<size_t>(i)]);
    const AverageCheck chk = uniform_average_check(ones, pre, k0, fam, norm);
    REQUIRE(chk.lhs == Catch::Approx(std::ldexp(1.0, -k0)).margin(1e-12));
    REQUIRE(chk.ratio == Catch::Approx(std::ldexp(1.0, -k0)).margin(1e-12));
  }
  CatalogParams p0;
  p0.num["c"] = 0.0;
  const ScalarField zeros = sample_catalog("constant", p0, 2, 5, unit_box(2, 5));
  PrefixTable pre0(zeros);
  CubeFamily one;
  one.budget = 2;
  one.cubes.push_back(enumerate_candidates(zeros.box(), 1, 16)[0]);
  REQUIRE(uniform_average_check(zeros, pre0, 1, one, 0.0).lhs == 0.0);
}

TEST_CASE("uniform average: cardinality bound enforced") {
  CatalogParams pc;
  pc.num["c"] = 1.0;
  const ScalarField ones = sample_catalog("constant", pc, 2, 4, unit_box(2, 4));
  PrefixTable pre(ones);
  CubeFamily fam;
  fam.budget = 100;
  for (const Cube& q : enumerate_candidates(ones.box(), 2, 4)) fam.cubes.push_back(q); // 16 > 2^2
  REQUIRE_THROWS_AS(uniform_average_check(ones, pre, 2, fam, 1.0), std::invalid_argument);
}
