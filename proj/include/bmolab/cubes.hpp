#pragma once

// Cube enumeration at dyadic scales, concentric/dyadic-parent doubling, and
// the capacity-capped first-fit grouping of equal-scale cube families.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "bmolab/geometry.hpp"

namespace bmolab {

/// All 2^-k cubes inside `box` whose anchors sit at multiples of `stride`
/// cells from the box origin. stride == 2^(m-k) yields the disjoint tiling.
inline std::vector<Cube> enumerate_candidates(const GridBox& box, int k, int64_t stride) {
  if (k > box.resolution_exp) throw std::invalid_argument("enumerate_candidates: k > m");
  const int64_t side = pow2i(box.resolution_exp - k);
  if (stride < 1 || stride > side) throw std::invalid_argument("enumerate_candidates: stride out of range");
  std::vector<Cube> out;
  const int64_t sx = (box.extent[0] - side) / stride;
  const int64_t sy = box.dim == 2 ? (box.extent[1] - side) / stride : 0;
  if (sx < 0 || sy < 0) return out;
  out.reserve(static_cast<size_t>((sx + 1) * (sy + 1)));
  for (int64_t ty = 0; ty <= sy; ++ty)
    for (int64_t tx = 0; tx <= sx; ++tx) {
      Cube q;
      q.dim = box.dim;
      q.scale_exp = k;
      q.resolution_exp = box.resolution_exp;
      q.anchor = {box.origin[0] + tx * stride, box.dim == 2 ? box.origin[1] + ty * stride : 0};
      out.push_back(q);
    }
  return out;
}

/// Concentric dilation, exact on the half-cell lattice. lambda is snapped to
/// a power of two >= 1.
inline Cube dilate(const Cube& q, double lambda) {
  if (lambda < 1.0) throw std::invalid_argument("dilate: lambda must be >= 1");
  const int t = static_cast<int>(std::lround(std::log2(lambda)));
  const int64_t s = q.side_cells();
  const int64_t lam = pow2i(std::max(t, 0));
  Cube out;
  out.dim = q.dim;
  out.resolution_exp = q.resolution_exp + 1;
  out.scale_exp = q.scale_exp - std::max(t, 0); // physical side lambda * 2^-k
  out.anchor = {2 * q.anchor[0] + s - s * lam, q.dim == 2 ? 2 * q.anchor[1] + s - s * lam : 0};
  out.validate();
  return out;
}

enum class GroupMode { rn, q0 };

struct Grouping {
  std::vector<std::vector<size_t>> groups; // index sets over the input family
  std::vector<Cube> doubled;               // enlarged cube per input index
  int64_t capacity = 0;                    // per-group cardinality cap
};

namespace detail {

inline Cube doubled_cube(const Cube& q, GroupMode mode) {
  if (mode == GroupMode::rn) return dilate(q, 2.0);
  // Dyadic parent of side 2^-(k-1); stays inside the closed unit cube.
  const int64_t s = q.side_cells();
  Cube p;
  p.dim = q.dim;
  p.resolution_exp = q.resolution_exp;
  p.scale_exp = q.scale_exp - 1;
  p.anchor = {(q.anchor[0] / (2 * s)) * (2 * s), q.dim == 2 ? (q.anchor[1] / (2 * s)) * (2 * s) : 0};
  p.validate();
  return p;
}

} // namespace detail

namespace detail {

inline bool assign_groups(const std::vector<Cube>& doubled, const std::vector<size_t>& order, int64_t cap,
                          int64_t max_groups, std::vector<std::vector<size_t>>& groups, long long node_budget) {
  long long nodes = 0;
  // Depth-first over placements in `order`; at each cube the groups are
  // tried first-fit style, and a fresh group only as the last resort. The
  // all-greedy branch is exactly the plain first-fit pass.
  std::vector<size_t> state; // group chosen per placed cube
  size_t pos = 0;
  std::vector<size_t> next_choice(order.size(), 0);
  groups.clear();
  while (true) {
    if (++nodes > node_budget) return false;
    if (pos == order.size()) return true;
    const size_t idx = order[pos];
    bool advanced = false;
    for (size_t g = next_choice[pos]; g <= groups.size() && g < static_cast<size_t>(max_groups); ++g) {
      if (g < groups.size()) {
        if (static_cast<int64_t>(groups[g].size()) >= cap) continue;
        bool clash = false;
        for (size_t other : groups[g])
          if (!cubes_disjoint(doubled[idx], doubled[other])) { clash = true; break; }
        if (clash) continue;
      } else {
        groups.push_back({});
      }
      groups[g].push_back(idx);
      state.push_back(g);
      next_choice[pos] = g + 1;
      ++pos;
      if (pos < order.size()) next_choice[pos] = 0;
      advanced = true;
      break;
    }
    if (!advanced) {
      if (pos == 0) return false;
      next_choice[pos] = 0;
      --pos;
      const size_t g = state.back();
      state.pop_back();
      groups[g].pop_back();
      if (groups[g].empty() && g + 1 == groups.size()) groups.pop_back();
    }
  }
}

} // namespace detail

/// Groups the doubled cubes into at most 2^n parts, each pairwise disjoint
/// and no larger than ceil(#J / 2^(n-1)). Cubes are placed in lexicographic
/// anchor order by sequential first-fit; the rare configurations where plain
/// first-fit overshoots 2^n groups are resolved by backtracking over the
/// same placement order (first-fit is its greedy branch). Throws when no
/// admissible grouping exists at all.
inline Grouping group_doubled(const CubeFamily& family, GroupMode mode) {
  family.validate(/*enforce_budget=*/false);
  const auto& cubes = family.cubes;
  Grouping g;
  if (cubes.empty()) return g;

  const int n = cubes[0].dim;
  const int k0 = cubes[0].scale_exp;
  if (mode == GroupMode::q0) {
    if (k0 < 2) throw std::invalid_argument("group_doubled: q0 mode needs scale_exp >= 2");
    const int64_t cells = pow2i(cubes[0].resolution_exp);
    const int64_t side = cubes[0].side_cells();
    for (const Cube& q : cubes) {
      for (int d = 0; d < n; ++d) {
        if (q.anchor[d] % side != 0) throw std::invalid_argument("group_doubled: non-dyadic cube in q0 mode");
        if (q.anchor[d] < 0 || q.anchor[d] + side > cells)
          throw std::invalid_argument("group_doubled: cube outside the unit cube in q0 mode");
      }
    }
  }

  g.doubled.reserve(cubes.size());
  for (const Cube& q : cubes) g.doubled.push_back(detail::doubled_cube(q, mode));

  const int64_t count = static_cast<int64_t>(cubes.size());
  const int64_t denom = pow2i(n - 1);
  g.capacity = (count + denom - 1) / denom;

  std::vector<size_t> order(cubes.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return cubes[a] < cubes[b]; });

  // Plain first-fit pass (no group limit), accepted when it lands within 2^n.
  for (size_t idx : order) {
    bool placed = false;
    for (auto& grp : g.groups) {
      if (static_cast<int64_t>(grp.size()) >= g.capacity) continue;
      bool clash = false;
      for (size_t other : grp)
        if (!cubes_disjoint(g.doubled[idx], g.doubled[other])) { clash = true; break; }
      if (!clash) {
        grp.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) g.groups.push_back({idx});
  }
  if (static_cast<int64_t>(g.groups.size()) <= pow2i(n)) return g;

  if (!detail::assign_groups(g.doubled, order, g.capacity, pow2i(n), g.groups, 50'000'000))
    throw std::runtime_error("group_doubled: no grouping into 2^n capped groups exists for this family");
  return g;
}

/// Independent verifier for a grouping: partition, per-group disjointness of
/// the doubled cubes, N <= 2^n, and the per-group cardinality cap — all
/// checked by brute force against the input family.
inline bool check_grouping(const CubeFamily& family, const Grouping& g, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const size_t count = family.cubes.size();
  if (count == 0) return g.groups.empty();
  const int n = family.cubes[0].dim;
  std::vector<int> seen(count, 0);
  for (const auto& grp : g.groups) {
    if (static_cast<int64_t>(grp.size()) > g.capacity) return fail("group over capacity");
    for (size_t a = 0; a < grp.size(); ++a) {
      if (grp[a] >= count) return fail("index out of range");
      seen[grp[a]] += 1;
      for (size_t b = a + 1; b < grp.size(); ++b)
        if (!cubes_disjoint(g.doubled[grp[a]], g.doubled[grp[b]])) return fail("doubled cubes overlap in a group");
    }
  }
  for (size_t i = 0; i < count; ++i)
    if (seen[i] != 1) return fail("not a partition");
  if (static_cast<int64_t>(g.groups.size()) > pow2i(n)) return fail("more than 2^n groups");
  const int64_t denom = pow2i(n - 1);
  const int64_t cap = (static_cast<int64_t>(count) + denom - 1) / denom;
  if (g.capacity != cap) return fail("capacity mismatch");
  for (size_t i = 0; i < count; ++i) {
    const int dl = g.doubled[i].resolution_exp - family.cubes[i].resolution_exp;
    if (dl < 0) return fail("doubled cube on a coarser lattice");
    if (!cube_contains_cube(g.doubled[i], refined(family.cubes[i], dl)))
      return fail("doubled cube does not contain its source");
  }
  return true;
}

} // namespace bmolab
