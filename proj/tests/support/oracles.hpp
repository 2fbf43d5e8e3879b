#pragma once

// Test-side oracles, independent of the library's solver paths.

#include <functional>
#include <vector>

#include "bmolab/field.hpp"
#include "bmolab/packing.hpp"

namespace bmolab::testing {

/// Exhaustive enumeration of all feasible subsets within the budget.
inline double exhaustive_best(const PackingInstance& inst) {
  double best = 0.0;
  std::vector<int> cur;
  std::function<void(size_t, double)> rec = [&](size_t pos, double val) {
    if (val > best) best = val;
    if (pos == inst.candidates.size() || static_cast<int64_t>(cur.size()) == inst.budget) return;
    for (size_t i = pos; i < inst.candidates.size(); ++i) {
      bool ok = true;
      for (int c : cur)
        if (!cubes_disjoint(inst.candidates[static_cast<size_t>(c)], inst.candidates[i])) { ok = false; break; }
      if (!ok) continue;
      cur.push_back(static_cast<int>(i));
      rec(i + 1, val + inst.weights[i]);
      cur.pop_back();
    }
  };
  rec(0, 0.0);
  return best;
}

/// Two-pass mean oscillation straight off the field, no prefix tables.
inline double oscillation_two_pass(const ScalarField& f, const Cube& q) {
  Complex s(0, 0);
  long long cnt = 0;
  const auto lo = q.anchor;
  const auto hi = q.upper();
  for (int64_t iy = lo[1]; iy < hi[1]; ++iy)
    for (int64_t ix = lo[0]; ix < hi[0]; ++ix) {
      s += f.at(ix, iy);
      ++cnt;
    }
  const Complex mean = s / static_cast<double>(cnt);
  double acc = 0.0;
  for (int64_t iy = lo[1]; iy < hi[1]; ++iy)
    for (int64_t ix = lo[0]; ix < hi[0]; ++ix) acc += std::abs(f.at(ix, iy) - mean);
  return acc / static_cast<double>(cnt);
}

} // namespace bmolab::testing
