#pragma once

// Budgeted maximum-weight disjoint-cube selection: the optimization behind
// the scale functional. Exact solvers certify optimality over the given
// candidate set; the tiling and greedy solvers are lower-bound heuristics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "bmolab/geometry.hpp"
#include "bmolab/rng.hpp"

namespace bmolab {

enum class SolveMethod { exact_1d, exact_bb, tiling, shifted_tiling, greedy_ls };

inline const char* method_name(SolveMethod m) {
  switch (m) {
    case SolveMethod::exact_1d: return "exact_1d";
    case SolveMethod::exact_bb: return "exact_bb";
    case SolveMethod::tiling: return "tiling";
    case SolveMethod::shifted_tiling: return "shifted_tiling";
    case SolveMethod::greedy_ls: return "greedy_ls";
  }
  return "?";
}

struct PackingInstance {
  std::vector<Cube> candidates; // one common scale
  std::vector<double> weights;  // nonnegative, finite
  int64_t budget = 1;           // K

  void validate() const {
    if (budget < 1) throw std::invalid_argument("PackingInstance: budget must be >= 1");
    if (weights.size() != candidates.size()) throw std::invalid_argument("PackingInstance: weight count mismatch");
    for (double w : weights)
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("PackingInstance: weights must be finite and >= 0");
    for (size_t i = 1; i < candidates.size(); ++i)
      if (candidates[i].scale_exp != candidates[0].scale_exp ||
          candidates[i].resolution_exp != candidates[0].resolution_exp ||
          candidates[i].dim != candidates[0].dim)
        throw std::invalid_argument("PackingInstance: mixed candidate scales");
  }
};

struct PackingSolution {
  std::vector<int> chosen;  // candidate indices, ascending (empty for tiling solutions)
  std::vector<Cube> cubes;  // the chosen cubes, lexicographic
  double value = 0.0;
  SolveMethod method = SolveMethod::greedy_ls;
  bool optimal = false;
};

namespace detail {

inline double chosen_value(const PackingInstance& inst, const std::vector<int>& chosen) {
  double v = 0.0;
  for (int i : chosen) v += inst.weights[static_cast<size_t>(i)];
  return v;
}

inline std::vector<Cube> chosen_cubes(const PackingInstance& inst, std::vector<int>& chosen) {
  std::sort(chosen.begin(), chosen.end());
  std::vector<Cube> cubes;
  cubes.reserve(chosen.size());
  for (int i : chosen) cubes.push_back(inst.candidates[static_cast<size_t>(i)]);
  std::sort(cubes.begin(), cubes.end());
  return cubes;
}

inline bool compatible(const PackingInstance& inst, const std::vector<int>& chosen, int cand) {
  for (int c : chosen)
    if (!cubes_disjoint(inst.candidates[static_cast<size_t>(c)], inst.candidates[static_cast<size_t>(cand)]))
      return false;
  return true;
}

/// Lexicographically smallest index set achieving `target` value, found by
/// fixing candidates in index order and re-solving the residual instance.
inline std::vector<int> lexmin_chosen(const PackingInstance& inst, double target,
                                      const std::function<double(const PackingInstance&)>& best_value) {
  const double tol = 1e-12 * (1.0 + std::abs(target));
  std::vector<int> chosen;
  double base = 0.0;
  for (size_t pos = 0; pos < inst.candidates.size(); ++pos) {
    if (static_cast<int64_t>(chosen.size()) == inst.budget) break;
    const int cand = static_cast<int>(pos);
    if (!compatible(inst, chosen, cand)) continue;
    PackingInstance residual;
    residual.budget = inst.budget - static_cast<int64_t>(chosen.size()) - 1;
    std::vector<int> map;
    for (size_t j = pos + 1; j < inst.candidates.size(); ++j) {
      const int cj = static_cast<int>(j);
      if (!compatible(inst, chosen, cj)) continue;
      if (!cubes_disjoint(inst.candidates[pos], inst.candidates[j])) continue;
      residual.candidates.push_back(inst.candidates[j]);
      residual.weights.push_back(inst.weights[j]);
      map.push_back(cj);
    }
    const double rest = residual.budget >= 1 && !residual.candidates.empty() ? best_value(residual) : 0.0;
    if (base + inst.weights[pos] + rest >= target - tol) {
      chosen.push_back(cand);
      base += inst.weights[pos];
      if (base >= target - tol) break;
    }
  }
  return chosen;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Exact 1-d solver: weighted interval scheduling with a budget dimension.

namespace detail {

inline double interval_dp_value(const PackingInstance& inst) {
  const size_t n = inst.candidates.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return inst.candidates[a].anchor[0] < inst.candidates[b].anchor[0]; });
  const int64_t side = n ? inst.candidates[0].side_cells() : 0;
  // prev[i]: number of sorted intervals wholly left of interval order[i]
  std::vector<size_t> prev(n, 0);
  std::vector<int64_t> anchors(n);
  for (size_t i = 0; i < n; ++i) anchors[i] = inst.candidates[order[i]].anchor[0];
  for (size_t i = 0; i < n; ++i) {
    const int64_t start = anchors[i];
    prev[i] = static_cast<size_t>(
        std::upper_bound(anchors.begin(), anchors.begin() + static_cast<std::ptrdiff_t>(i), start - side) -
        anchors.begin());
  }
  const size_t K = static_cast<size_t>(std::min<int64_t>(inst.budget, static_cast<int64_t>(n)));
  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(K + 1, 0.0));
  for (size_t i = 1; i <= n; ++i)
    for (size_t u = 0; u <= K; ++u) {
      double best = dp[i - 1][u];
      if (u >= 1) best = std::max(best, inst.weights[order[i - 1]] + dp[prev[i - 1]][u - 1]);
      dp[i][u] = best;
    }
  return dp[n][K];
}

} // namespace detail

/// Optimal budgeted selection of disjoint intervals (dim == 1).
inline PackingSolution solve_exact_1d(const PackingInstance& inst) {
  inst.validate();
  if (!inst.candidates.empty() && inst.candidates[0].dim != 1)
    throw std::invalid_argument("solve_exact_1d: instance is not 1-dimensional");
  PackingSolution sol;
  sol.method = SolveMethod::exact_1d;
  sol.optimal = true;
  if (inst.candidates.empty()) return sol;
  sol.value = detail::interval_dp_value(inst);
  sol.chosen = detail::lexmin_chosen(inst, sol.value, detail::interval_dp_value);
  sol.value = detail::chosen_value(inst, sol.chosen);
  sol.cubes = detail::chosen_cubes(inst, sol.chosen);
  return sol;
}

// ---------------------------------------------------------------------------
// Branch and bound for dim == 2.

namespace detail {

struct BbState {
  const PackingInstance* inst = nullptr;
  std::vector<size_t> order;                // by weight desc, index asc
  std::vector<std::vector<uint32_t>> conflicts; // per order-position: later order-positions in conflict
  long long node_limit = 0;
  long long nodes = 0;
  double best = -1.0;
  std::vector<int> best_set;
  std::vector<int> cur;
  bool complete = true;
};

inline void bb_dfs(BbState& st, size_t pos, const std::vector<uint8_t>& avail, double value, int64_t left) {
  if (++st.nodes > st.node_limit) {
    st.complete = false;
    return;
  }
  if (value > st.best + 1e-12) {
    st.best = value;
    st.best_set = st.cur;
  }
  if (left == 0 || pos == st.order.size()) return;
  // Upper bound: current value plus the heaviest `left` available weights.
  double ub = value;
  int64_t picked = 0;
  for (size_t p = pos; p < st.order.size() && picked < left; ++p)
    if (avail[p]) {
      ub += st.inst->weights[st.order[p]];
      ++picked;
    }
  if (ub <= st.best + 1e-12) return;

  size_t next = pos;
  while (next < st.order.size() && !avail[next]) ++next;
  if (next == st.order.size()) return;

  // Include branch first: heaviest available candidate.
  std::vector<uint8_t> sub = avail;
  sub[next] = 0;
  for (uint32_t c : st.conflicts[next]) sub[c] = 0;
  st.cur.push_back(static_cast<int>(st.order[next]));
  bb_dfs(st, next + 1, sub, value + st.inst->weights[st.order[next]], left - 1);
  st.cur.pop_back();
  if (!st.complete) return;

  // Exclude branch.
  std::vector<uint8_t> excl = avail;
  excl[next] = 0;
  bb_dfs(st, next + 1, excl, value, left);
}

inline double bb_value_only(const PackingInstance& inst, long long node_limit, bool* complete);

} // namespace detail

/// Best-first branch and bound over a 2-d candidate set. `optimal` is true
/// iff the search completed within `node_limit`; otherwise the incumbent is
/// returned with optimal = false.
inline PackingSolution solve_exact_bb(const PackingInstance& inst, long long node_limit = 1'000'000) {
  inst.validate();
  PackingSolution sol;
  sol.method = SolveMethod::exact_bb;
  if (inst.candidates.empty()) {
    sol.optimal = true;
    return sol;
  }

  // Zero-weight candidates never improve the value; drop them up front.
  PackingInstance work;
  work.budget = inst.budget;
  std::vector<int> map;
  for (size_t i = 0; i < inst.candidates.size(); ++i)
    if (inst.weights[i] > 0.0) {
      work.candidates.push_back(inst.candidates[i]);
      work.weights.push_back(inst.weights[i]);
      map.push_back(static_cast<int>(i));
    }
  if (work.candidates.empty()) {
    sol.optimal = true;
    return sol;
  }

  detail::BbState st;
  st.inst = &work;
  st.node_limit = node_limit;
  st.order.resize(work.candidates.size());
  std::iota(st.order.begin(), st.order.end(), size_t{0});
  std::stable_sort(st.order.begin(), st.order.end(), [&](size_t a, size_t b) {
    if (work.weights[a] != work.weights[b]) return work.weights[a] > work.weights[b];
    return a < b;
  });
  st.conflicts.resize(st.order.size());
  for (size_t p = 0; p < st.order.size(); ++p)
    for (size_t q = p + 1; q < st.order.size(); ++q)
      if (!cubes_disjoint(work.candidates[st.order[p]], work.candidates[st.order[q]]))
        st.conflicts[p].push_back(static_cast<uint32_t>(q));

  std::vector<uint8_t> avail(st.order.size(), 1);
  detail::bb_dfs(st, 0, avail, 0.0, std::min<int64_t>(work.budget, static_cast<int64_t>(work.candidates.size())));

  sol.optimal = st.complete;
  std::vector<int> chosen = st.best_set;
  if (sol.optimal && work.candidates.size() <= 64) {
    // Small instances get the lexicographically smallest optimal set.
    chosen = detail::lexmin_chosen(work, st.best, [&](const PackingInstance& sub) {
      bool done = true;
      const double v = detail::bb_value_only(sub, node_limit, &done);
      return done ? v : -std::numeric_limits<double>::infinity();
    });
  }
  for (int& c : chosen) c = map[static_cast<size_t>(c)];
  sol.chosen = chosen;
  sol.value = detail::chosen_value(inst, sol.chosen);
  sol.cubes = detail::chosen_cubes(inst, sol.chosen);
  return sol;
}

namespace detail {

inline double bb_value_only(const PackingInstance& inst, long long node_limit, bool* complete) {
  PackingSolution s = solve_exact_bb(inst, node_limit);
  if (complete) *complete = s.optimal;
  return s.value;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Tiling and greedy heuristics.

/// Top-K tiles over each shifted disjoint tiling of `box`; tiles that leave
/// the box are dropped. Weights come from `weight_fn`. Returns the best
/// shift's selection; `exhaustive` marks the caller's claim that the shift
/// tilings are the entire candidate universe.
inline PackingSolution solve_tiling(const GridBox& box, int k, int64_t K,
                                    const std::vector<std::array<int64_t, 2>>& shifts,
                                    const std::function<double(const Cube&)>& weight_fn, bool exhaustive = false) {
  if (shifts.empty()) throw std::invalid_argument("solve_tiling: empty shift list");
  if (k > box.resolution_exp) throw std::invalid_argument("solve_tiling: k > m");
  const int64_t side = pow2i(box.resolution_exp - k);
  PackingSolution best;
  best.method = shifts.size() == 1 ? SolveMethod::tiling : SolveMethod::shifted_tiling;
  best.value = -1.0;
  for (const auto& shift : shifts) {
    for (int d = 0; d < box.dim; ++d)
      if (shift[d] < 0 || shift[d] >= side) throw std::invalid_argument("solve_tiling: shift outside one tile");
    std::vector<std::pair<double, Cube>> tiles;
    const int64_t tx = (box.extent[0] - shift[0]) / side;
    const int64_t ty = box.dim == 2 ? (box.extent[1] - shift[1]) / side : 1;
    for (int64_t iy = 0; iy < ty; ++iy)
      for (int64_t ix = 0; ix < tx; ++ix) {
        Cube q;
        q.dim = box.dim;
        q.scale_exp = k;
        q.resolution_exp = box.resolution_exp;
        q.anchor = {box.origin[0] + shift[0] + ix * side,
                    box.dim == 2 ? box.origin[1] + shift[1] + iy * side : 0};
        tiles.emplace_back(weight_fn(q), q);
      }
    std::stable_sort(tiles.begin(), tiles.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    double value = 0.0;
    std::vector<Cube> cubes;
    for (int64_t i = 0; i < std::min<int64_t>(K, static_cast<int64_t>(tiles.size())); ++i) {
      value += tiles[static_cast<size_t>(i)].first;
      cubes.push_back(tiles[static_cast<size_t>(i)].second);
    }
    if (value > best.value + 1e-15) {
      best.value = value;
      std::sort(cubes.begin(), cubes.end());
      best.cubes = std::move(cubes);
    }
  }
  best.value = std::max(best.value, 0.0);
  best.optimal = exhaustive && shifts.size() == 1;
  return best;
}

/// Weight-greedy selection with conflict skipping, then first-improvement
/// (add, 1-swap, 2-swap) local search. Deterministic for a fixed seed: the
/// seed only drives the scan order of the move neighborhood.
inline PackingSolution solve_greedy_ls(const PackingInstance& inst, int iterations, std::uint64_t seed,
                                       size_t neighborhood = 2000, size_t pair_neighborhood = 150) {
  inst.validate();
  PackingSolution sol;
  sol.method = SolveMethod::greedy_ls;
  sol.optimal = false;
  const size_t n = inst.candidates.size();
  if (n == 0) return sol;

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (inst.weights[a] != inst.weights[b]) return inst.weights[a] > inst.weights[b];
    return a < b;
  });

  std::vector<int> chosen;
  for (size_t p : order) {
    if (static_cast<int64_t>(chosen.size()) >= inst.budget) break;
    if (inst.weights[p] <= 0.0) break;
    if (detail::compatible(inst, chosen, static_cast<int>(p))) chosen.push_back(static_cast<int>(p));
  }

  const size_t hood = std::min(neighborhood, n);
  const size_t pair_hood = std::min(pair_neighborhood, n);
  Rng rng(seed);
  auto value_of = [&](const std::vector<int>& set) { return detail::chosen_value(inst, set); };
  double value = value_of(chosen);

  for (int round = 0; round < iterations; ++round) {
    bool improved = false;
    std::vector<size_t> scan(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hood));
    for (size_t i = scan.size(); i > 1; --i) std::swap(scan[i - 1], scan[rng.below(i)]);

    // Pure adds.
    if (static_cast<int64_t>(chosen.size()) < inst.budget) {
      for (size_t p : scan) {
        const int c = static_cast<int>(p);
        if (inst.weights[p] <= 0.0) continue;
        if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
        if (detail::compatible(inst, chosen, c)) {
          chosen.push_back(c);
          value += inst.weights[p];
          improved = true;
          if (static_cast<int64_t>(chosen.size()) >= inst.budget) break;
        }
      }
    }

    // 1-swaps: replace one member by a heavier compatible candidate.
    for (size_t ci = 0; ci < chosen.size() && !improved; ++ci) {
      std::vector<int> rest = chosen;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(ci));
      for (size_t p : scan) {
        const int a = static_cast<int>(p);
        if (inst.weights[p] <= inst.weights[static_cast<size_t>(chosen[ci])]) continue;
        if (std::find(chosen.begin(), chosen.end(), a) != chosen.end()) continue;
        if (detail::compatible(inst, rest, a)) {
          rest.push_back(a);
          chosen = rest;
          value = value_of(chosen);
          improved = true;
          break;
        }
      }
    }

    // 2-swaps: replace one member by two candidates (needs budget room after the swap).
    if (!improved && static_cast<int64_t>(chosen.size()) <= inst.budget) {
      for (size_t ci = 0; ci < chosen.size() && !improved; ++ci) {
        if (static_cast<int64_t>(chosen.size()) + 1 > inst.budget) break;
        std::vector<int> rest = chosen;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(ci));
        const double removed = inst.weights[static_cast<size_t>(chosen[ci])];
        for (size_t pi = 0; pi < pair_hood && !improved; ++pi) {
          const int a1 = static_cast<int>(order[pi]);
          if (std::find(chosen.begin(), chosen.end(), a1) != chosen.end()) continue;
          if (!detail::compatible(inst, rest, a1)) continue;
          for (size_t pj = pi + 1; pj < pair_hood; ++pj) {
            const int a2 = static_cast<int>(order[pj]);
            if (std::find(chosen.begin(), chosen.end(), a2) != chosen.end()) continue;
            if (inst.weights[static_cast<size_t>(a1)] + inst.weights[static_cast<size_t>(a2)] <= removed + 1e-15)
              break; // order is weight-sorted; later pairs only get lighter
            if (!cubes_disjoint(inst.candidates[static_cast<size_t>(a1)], inst.candidates[static_cast<size_t>(a2)]))
              continue;
            if (!detail::compatible(inst, rest, a2)) continue;
            rest.push_back(a1);
            rest.push_back(a2);
            chosen = rest;
            value = value_of(chosen);
            improved = true;
            break;
          }
        }
      }
    }
    if (!improved) break;
  }

  sol.chosen = chosen;
  sol.value = detail::chosen_value(inst, sol.chosen);
  sol.cubes = detail::chosen_cubes(inst, sol.chosen);
  return sol;
}

} // namespace bmolab
