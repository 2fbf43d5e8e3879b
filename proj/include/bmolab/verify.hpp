#pragma once

// Property suites behind `verify <suite>` and the acceptance runner. Each
// suite is seeded, deterministic, and reports pass/fail with a
// counterexample dump on failure plus a headline statistic where one is
// meaningful (the empirical-constant suites return their measured max).

#include <chrono>
#include <string>
#include <vector>

#include "bmolab/calibration.hpp"
#include "bmolab/cubes.hpp"
#include "bmolab/generators.hpp"
#include "bmolab/norms.hpp"
#include "bmolab/parallel.hpp"
#include "bmolab/perimeter.hpp"
#include "bmolab/superposition.hpp"

namespace bmolab {

struct VerifySettings {
  std::uint64_t seed = 2026;
  int threads = 1;
  bool quick = false;     // reduced trial counts for unit-test use
  double tolerance = 0.0; // 0 = suite default
};

struct SuiteResult {
  std::string id;
  bool pass = false;
  double statistic = 0.0; // suite-specific headline (0 when not meaningful)
  std::vector<std::string> log;
  std::string counterexample;
  double elapsed_seconds = 0.0;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1) + 0x94d049bb133111ebull * (c + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  return x;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------

inline SuiteResult suite_grouping(const VerifySettings& st) {
  SuiteResult res;
  res.id = "grouping";
  const int trials = st.quick ? 500 : 10000;
  res.pass = true;
  long max_groups = 0;
  for (int t = 0; t < trials && res.pass; ++t) {
    for (int dim : {1, 2}) {
      for (GroupMode mode : {GroupMode::rn, GroupMode::q0}) {
        Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(dim),
                                 mode == GroupMode::q0 ? 1 : 0));
        const CubeFamily fam = random_disjoint_family(rng, dim, mode);
        try {
          const Grouping g = group_doubled(fam, mode);
          std::string why;
          if (!check_grouping(fam, g, &why)) {
            res.pass = false;
            res.counterexample = "trial " + std::to_string(t) + " dim " + std::to_string(dim) + ": checker says " + why;
            break;
          }
          max_groups = std::max<long>(max_groups, static_cast<long>(g.groups.size()));
        } catch (const std::exception& e) {
          res.pass = false;
          res.counterexample =
              "trial " + std::to_string(t) + " dim " + std::to_string(dim) + ": " + e.what() + " (#J=" +
              std::to_string(fam.cubes.size()) + ")";
          break;
        }
      }
      if (!res.pass) break;
    }
  }
  res.statistic = static_cast<double>(max_groups);
  res.log.push_back(std::to_string(trials) + " trials x {rn,q0} x {n=1,n=2}; max group count " +
                    std::to_string(max_groups));
  return res;
}

inline SuiteResult suite_uniform_average(const VerifySettings& st, int m = 6) {
  SuiteResult res;
  res.id = "uniform-average";
  const int fields = st.quick ? 20 : 100;
  const double limit = st.tolerance > 0.0 ? st.tolerance : calibration::kUniformAverage;
  double worst = 0.0;
  res.pass = true;
  for (int t = 0; t < fields && res.pass; ++t) {
    Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), 11));
    const ScalarField f = random_field(rng, 2, m, unit_box(2, m));
    PrefixTable pre(f);
    const NormReport norm = b_norm(f, NormMode::q0, {}, &pre);
    for (int k0 = 1; k0 <= 4; ++k0) {
      CubeFamily fam;
      fam.budget = eps_budget(2, k0);
      const int64_t slots = pow2i(k0);
      const int64_t take = 1 + static_cast<int64_t>(rng.below(static_cast<std::uint64_t>(fam.budget)));
      std::vector<int64_t> cells(static_cast<size_t>(slots * slots));
      std::iota(cells.begin(), cells.end(), 0);
      for (int64_t i = 0; i < take; ++i) {
        const int64_t j = i + static_cast<int64_t>(rng.below(static_cast<std::uint64_t>(cells.size() - i)));
        std::swap(cells[static_cast<size_t>(i)], cells[static_cast<size_t>(j)]);
        Cube q;
        q.dim = 2;
        q.scale_exp = k0;
        q.resolution_exp = m;
        q.anchor = {(cells[static_cast<size_t>(i)] % slots) * pow2i(m - k0),
                    (cells[static_cast<size_t>(i)] / slots) * pow2i(m - k0)};
        fam.cubes.push_back(q);
      }
      const AverageCheck chk = uniform_average_check(f, pre, k0, fam, norm.total);
      worst = std::max(worst, chk.ratio);
      if (chk.ratio > limit) {
        res.pass = false;
        res.counterexample = "field " + std::to_string(t) + " k0 " + std::to_string(k0) + ": ratio " +
                             detail::fmt(chk.ratio) + " > " + detail::fmt(limit);
        break;
      }
    }
  }
  res.statistic = worst;
  res.log.push_back(std::to_string(fields) + " fields (m=" + std::to_string(m) + "), max ratio " + detail::fmt(worst) +
                    " vs frozen " + detail::fmt(limit));
  return res;
}

inline SuiteResult suite_multiplier(const VerifySettings& st, int m = 6) {
  SuiteResult res;
  res.id = "multiplier";
  const int fields = st.quick ? 10 : 50;
  const double limit = st.tolerance > 0.0 ? st.tolerance : calibration::kMultiplier;
  const int bump_j = 4;
  const double bump_scale = 0.5;
  CatalogParams pp;
  pp.num["j"] = bump_j;
  pp.num["scale"] = bump_scale;
  pp.num["base_x"] = 0.5;
  pp.num["base_y"] = 0.5;
  const ScalarField phi = sample_catalog("phi_bump_array", pp, 2, m, unit_box(2, m));
  const double phi_sup = 1.0;
  const double phi_grad = profile::theta_j_lipschitz(bump_j, bump_scale);
  double worst = 0.0;
  res.pass = true;
  for (int t = 0; t < fields && res.pass; ++t) {
    Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), 13));
    const ScalarField f = random_field(rng, 2, m, unit_box(2, m));
    std::vector<Complex> vals(f.values().size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = f.values()[i] * phi.values()[i];
    const ScalarField pf(f.box(), std::move(vals));
    const double nf = b_norm(f, NormMode::q0).total;
    const double npf = b_norm(pf, NormMode::q0).total;
    const double ratio = nf > 0.0 ? npf / ((phi_sup + phi_grad) * nf) : 0.0;
    worst = std::max(worst, ratio);
    if (ratio > limit) {
      res.pass = false;
      res.counterexample = "field " + std::to_string(t) + ": ratio " + detail::fmt(ratio) + " > " + detail::fmt(limit);
    }
  }
  res.statistic = worst;
  res.log.push_back(std::to_string(fields) + " fields (m=" + std::to_string(m) + "), max ratio " + detail::fmt(worst) +
                    " vs frozen " + detail::fmt(limit));
  return res;
}

inline SuiteResult suite_dilation(const VerifySettings& st, int m = 6) {
  SuiteResult res;
  res.id = "dilation";
  const int fields = st.quick ? 10 : 50;
  const double limit = st.tolerance > 0.0 ? st.tolerance : calibration::kDilation;
  double worst = 0.0;
  res.pass = true;
  for (int t = 0; t < fields && res.pass; ++t) {
    Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), 17));
    const ScalarField f0 = random_field(rng, 2, m, unit_box(2, m));
    const ScalarField f = f0.embedded(unit_window(2, m, {-1, -1}, {3, 3}));
    const double nf = b_norm(f, NormMode::rn_window).total;
    for (int L : {1, 2}) {
      const ScalarField fd = f0.dilated_argument(L).embedded(unit_window(2, m + L, {-1, -1}, {3, 3}));
      const double nfd = b_norm(fd, NormMode::rn_window).total;
      const double ratio = nf > 0.0 ? nfd / nf : 0.0;
      worst = std::max(worst, ratio);
      if (ratio > limit) {
        res.pass = false;
        res.counterexample = "field " + std::to_string(t) + " lambda 2^" + std::to_string(L) + ": ratio " +
                             detail::fmt(ratio) + " > " + detail::fmt(limit);
        break;
      }
    }
  }
  res.statistic = worst;
  res.log.push_back(std::to_string(fields) + " fields (m=" + std::to_string(m) + "), lambda in {2,4}, max ratio " +
                    detail::fmt(worst) + " vs frozen " + detail::fmt(limit));
  return res;
}

inline SuiteResult suite_lipschitz(const VerifySettings& st) {
  SuiteResult res;
  res.id = "lipschitz";
  const int fields = st.quick ? 10 : 50;
  const double slack = st.tolerance > 0.0 ? st.tolerance : 1e-9;
  const GMap maps[] = {GMap::make_abs(), GMap::make_clamp(1.0), GMap::make_affine({2, 0}, {0, 1})};
  res.pass = true;
  double worst_margin = 1e300;
  for (int t = 0; t < fields && res.pass; ++t) {
    Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), 19));
    const ScalarField f = random_field(rng, 2, 6, unit_box(2, 6));
    for (const GMap& g : maps) {
      const BoundCheck chk = lipschitz_bound_check(g, f, NormMode::q0, {}, slack);
      worst_margin = std::min(worst_margin, chk.rhs - chk.lhs);
      if (!chk.holds) {
        res.pass = false;
        res.counterexample = "field " + std::to_string(t) + " g=" + gkind_name(g.kind) + ": lhs " +
                             detail::fmt(chk.lhs) + " > rhs " + detail::fmt(chk.rhs);
        break;
      }
    }
  }
  res.statistic = worst_margin;
  res.log.push_back(std::to_string(fields) + " fields x 3 maps (n=2, m=6); min slack rhs-lhs = " +
                    detail::fmt(worst_margin));
  return res;
}

inline SuiteResult suite_modulus_transfer(const VerifySettings& st) {
  SuiteResult res;
  res.id = "modulus-transfer";
  const int trials = st.quick ? 100 : 1000;
  const double slack = st.tolerance > 0.0 ? st.tolerance : 1e-9;
  const GMap g = GMap::make_abs();
  Modulus w; // w(t) = t
  w.L = 1.0;
  res.pass = true;
  for (int t = 0; t < trials && res.pass; ++t) {
    Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), 23));
    const int m = 4 + static_cast<int>(rng.range(0, 1));
    const ScalarField f = random_field(rng, 2, m, unit_box(2, m));
    const ScalarField gf = apply(g, f);
    PrefixTable pre_f(f), pre_gf(gf);
    const int k = static_cast<int>(rng.range(1, m - 1));
    const EpsReport rep = eps_functional(gf, pre_gf, k);
    const double prefactor = std::ldexp(1.0, -k);
    double sum_g = 0.0, sum_f = 0.0;
    for (const Cube& q : rep.family.cubes) {
      sum_g += mean_oscillation(gf, pre_gf, q);
      sum_f += mean_oscillation(f, pre_f, q);
    }
    const double lhs = prefactor * sum_g;
    const double rhs = w(2.0 * prefactor * sum_f);
    if (lhs > rhs + slack) {
      res.pass = false;
      res.counterexample = "trial " + std::to_string(t) + " k " + std::to_string(k) + ": " + detail::fmt(lhs) + " > " +
                           detail::fmt(rhs);
    }
  }
  res.log.push_back(std::to_string(trials) + " per-family Jensen-chain trials (g=abs, w(t)=t)");
  return res;
}

inline SuiteResult suite_lbls(const VerifySettings& st) {
  SuiteResult res;
  res.id = "lbls";
  const int trials = st.quick ? 100 : 1000;
  const double slack = st.tolerance > 0.0 ? st.tolerance : 1e-9;
  const GMap g = GMap::make_abs();
  Modulus w;
  w.L = 1.0;
  res.pass = true;
  for (int t = 0; t < trials && res.pass; ++t) {
    Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), 29));
    const int m = 4;
    const ScalarField f = random_field(rng, 2, m, unit_box(2, m));
    const ScalarField h = random_field(rng, 2, m, unit_box(2, m));
    const int k = static_cast<int>(rng.range(1, 3));
    const int64_t side = pow2i(m - k);
    Cube q;
    q.dim = 2;
    q.scale_exp = k;
    q.resolution_exp = m;
    q.anchor = {rng.range(0, pow2i(m) - side), rng.range(0, pow2i(m) - side)};
    const TransferCheck chk = oscillation_transfer_check(g, w, f, h, q, slack);
    if (!chk.holds) {
      res.pass = false;
      res.counterexample = "trial " + std::to_string(t) + ": lhs " + detail::fmt(chk.lhs) + " > min-bound " +
                           detail::fmt(chk.rhs);
    }
  }
  res.log.push_back(std::to_string(trials) + " oscillation-transfer min-bound trials (g=abs, w(t)=t)");
  return res;
}

inline SuiteResult suite_theta_decay(const VerifySettings& st) {
  SuiteResult res;
  res.id = "theta-decay";
  const int m = st.quick ? 8 : 10;
  double lo = 1e300, hi = 0.0;
  for (int j : {8, 16, 32, 64}) {
    const ScalarField th = theta_gadget(j, 2, m);
    const double product = bmo_norms(th, BmoFlavor::bmo_rn) * std::log2(static_cast<double>(j));
    lo = std::min(lo, product);
    hi = std::max(hi, product);
    res.log.push_back("j=" + std::to_string(j) + ": bmo*log2(j) = " + detail::fmt(product));
  }
  res.statistic = hi / lo;
  res.pass = hi / lo < 2.0;
  if (!res.pass) res.counterexample = "product spread " + detail::fmt(hi / lo) + " >= 2";
  res.log.push_back("spread " + detail::fmt(hi / lo) + " (must be < 2), m=" + std::to_string(m));
  return res;
}

inline SuiteResult suite_lhe(const VerifySettings& st) {
  SuiteResult res;
  res.id = "lhe";
  const double slack = st.tolerance > 0.0 ? st.tolerance : 1e-6;
  const GMap maps[] = {GMap::make_abs(), GMap::make_affine({1, 0}, {0, 0})};
  const std::pair<Complex, Complex> pairs[] = {
      {{0, 0}, {0.2, 0}},
      {{0.3, 0}, {0.3, 0.15}},
      {{-0.1, 0.05}, {0.1, 0.05}},
      {{0.25, 0.25}, {0.35, 0.25}},
  };
  res.pass = true;
  double min_gap = 1e300;
  for (int j : {3, 4}) {
    for (const auto& [a, b] : pairs) {
      const PlateauGadget gadget = make_plateau_gadget(a, b, j, 2, j + 3);
      for (const GMap& g : maps) {
        const ValueDifferenceBound vb = value_difference_bound(g, gadget, {}, slack);
        min_gap = std::min(min_gap, vb.upper - vb.lower);
        if (!vb.holds) {
          res.pass = false;
          res.counterexample = "j=" + std::to_string(j) + " g=" + gkind_name(g.kind) + ": lower " +
                               detail::fmt(vb.lower) + " > upper " + detail::fmt(vb.upper);
          return res;
        }
      }
    }
  }
  res.statistic = min_gap;
  res.log.push_back("j in {3,4}, 4 value pairs (|a-b| <= 0.2), g in {abs, affine(1,0)}; min upper-lower gap " +
                    detail::fmt(min_gap));
  return res;
}

inline SuiteResult suite_affinity(const VerifySettings& st) {
  SuiteResult res;
  res.id = "affinity";
  const double tol = st.tolerance > 0.0 ? st.tolerance : 0.02;
  const int j = 4, m = 5;
  const AffinityWitness wit = affinity_witness(GMap::make_abs(), {1, 0}, {-1, 0}, j, 2, 2, m, {}, tol);
  res.log.push_back("abs: diff_norm " + detail::fmt(wit.diff_norm) + " vs lower 0.375 - " + detail::fmt(tol));
  bool ok = wit.diff_norm >= 0.375 - tol;
  const AffinityWitness aff = affinity_witness(GMap::make_affine({2, 0}, {0, 1}), {1, 0}, {-1, 0}, j, 2, 2, m, {}, tol);
  res.log.push_back("affine(2,i): lower " + detail::fmt(aff.lower) + " (vacuous)");
  ok = ok && aff.lower <= 1e-12 && aff.holds;
  res.pass = ok;
  res.statistic = wit.diff_norm;
  if (!ok) res.counterexample = "diff_norm " + detail::fmt(wit.diff_norm) + " under 0.375 - tol";
  return res;
}

inline SuiteResult suite_n1_identity(const VerifySettings& st) {
  SuiteResult res;
  res.id = "n1-identity";
  const int fields = st.quick ? 10 : 50;
  const double tol = st.tolerance > 0.0 ? st.tolerance : 1e-12;
  const int m = 8;
  res.pass = true;
  for (int t = 0; t < fields && res.pass; ++t) {
    Rng rng(detail::mix_seed(st.seed, static_cast<std::uint64_t>(t), 31));
    const ScalarField f = random_field(rng, 1, m, unit_box(1, m));
    PrefixTable pre(f);
    const SolverPolicy policy;
    for (int k = 1; k <= m; ++k) {
      const EpsReport rep = eps_functional(f, pre, k, policy);
      double best = 0.0; // independent scan over the same candidate set
      for (const Cube& q : enumerate_candidates(f.box(), k, policy.stride_for(m, k)))
        best = std::max(best, mean_oscillation(f, pre, q));
      if (std::abs(rep.value - best) > tol) {
        res.pass = false;
        res.counterexample = "field " + std::to_string(t) + " k " + std::to_string(k) + ": " + detail::fmt(rep.value) +
                             " vs max oscillation " + detail::fmt(best);
        break;
      }
    }
  }
  res.log.push_back(std::to_string(fields) + " fields (n=1, m=8), all k: functional == max single-interval oscillation");
  return res;
}

inline SuiteResult suite_perimeter(const VerifySettings& st) {
  SuiteResult res;
  res.id = "perimeter";
  const int m = st.quick ? 8 : 10;
  const int k_hi = st.quick ? 5 : 7;
  const double rel_tol = st.tolerance > 0.0 ? st.tolerance : 0.10;
  res.pass = true;
  for (const auto& [w, target] : {std::pair<double, double>{0.5, 0.5}, {0.2, 0.4}}) {
    const IndicatorSet A = IndicatorSet::axis_rect(w, w);
    const SweepResult sweep = eps_sweep(A, m, 2, k_hi);
    std::string line = "rect(" + detail::fmt(w) + "): ";
    double prev = 0.0;
    for (const EpsReport& r : sweep.per_k) {
      line += "k" + std::to_string(r.k) + "=" + detail::fmt(r.value) + " ";
      if (r.value > 0.5 + 1e-12) {
        res.pass = false;
        res.counterexample = "value above 1/2 at k " + std::to_string(r.k);
      }
      if (r.value < prev * (1.0 - 0.02)) {
        res.pass = false;
        res.counterexample = "sequence decreased beyond 2% at k " + std::to_string(r.k);
      }
      prev = std::max(prev, r.value);
    }
    const double rel = std::abs(sweep.per_k.back().value - target) / target;
    line += "target " + detail::fmt(target) + " rel_err " + detail::fmt(rel);
    res.log.push_back(line);
    res.log.push_back("caveat: " + sweep.caveat);
    res.statistic = std::max(res.statistic, rel);
    if (rel > rel_tol) {
      res.pass = false;
      res.counterexample = "finest-scale relative error " + detail::fmt(rel) + " > " + detail::fmt(rel_tol);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

inline std::vector<std::string> verify_suite_ids() {
  return {"grouping",  "uniform-average", "multiplier", "dilation", "lipschitz", "modulus-transfer",
          "lbls",      "theta-decay",     "lhe",        "affinity", "n1-identity", "perimeter"};
}

inline SuiteResult run_verify_suite(const std::string& id, const VerifySettings& st) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  if (id == "grouping") res = suite_grouping(st);
  else if (id == "uniform-average") res = suite_uniform_average(st);
  else if (id == "multiplier") res = suite_multiplier(st);
  else if (id == "dilation") res = suite_dilation(st);
  else if (id == "lipschitz") res = suite_lipschitz(st);
  else if (id == "modulus-transfer") res = suite_modulus_transfer(st);
  else if (id == "lbls") res = suite_lbls(st);
  else if (id == "theta-decay") res = suite_theta_decay(st);
  else if (id == "lhe") res = suite_lhe(st);
  else if (id == "affinity") res = suite_affinity(st);
  else if (id == "n1-identity") res = suite_n1_identity(st);
  else if (id == "perimeter") res = suite_perimeter(st);
  else throw std::invalid_argument("unknown verify suite '" + id + "'");
  res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

} // namespace bmolab
