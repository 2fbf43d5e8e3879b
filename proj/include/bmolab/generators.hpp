#pragma once

// Seeded generators for randomized suites: disjoint cube families and
// piecewise-constant test fields. Every draw is a pure function of the Rng
// stream, so a fixed seed reproduces a trial exactly.

#include <vector>

#include "bmolab/cubes.hpp"
#include "bmolab/field.hpp"
#include "bmolab/geometry.hpp"
#include "bmolab/rng.hpp"

namespace bmolab {

/// Random pairwise-disjoint equal-scale family. q0 mode draws a subset of
/// the dyadic scale-k0 tiling of the unit cube; rn mode rejection-samples
/// lattice anchors inside a window whose size varies from tight to loose.
inline CubeFamily random_disjoint_family(Rng& rng, int dim, GroupMode mode) {
  const int k0 = static_cast<int>(rng.range(2, 5));
  const int m = k0 + static_cast<int>(rng.range(1, 3));
  const int64_t side = pow2i(m - k0);
  const int64_t target = dim == 1 ? rng.range(1, 12) : rng.range(1, pow2i(k0));

  CubeFamily fam;
  fam.budget = std::max<int64_t>(target, eps_budget(dim, k0));

  if (mode == GroupMode::q0) {
    const int64_t slots = pow2i(k0);
    std::vector<int64_t> cells;
    if (dim == 1) {
      for (int64_t i = 0; i < slots; ++i) cells.push_back(i);
    } else {
      for (int64_t i = 0; i < slots * slots; ++i) cells.push_back(i);
    }
    // Partial Fisher-Yates: the first `take` entries are a uniform subset.
    const int64_t take = std::min<int64_t>(target, static_cast<int64_t>(cells.size()));
    for (int64_t i = 0; i < take; ++i) {
      const int64_t j = i + static_cast<int64_t>(rng.below(static_cast<std::uint64_t>(cells.size() - i)));
      std::swap(cells[i], cells[j]);
      Cube q;
      q.dim = dim;
      q.scale_exp = k0;
      q.resolution_exp = m;
      const int64_t cx = dim == 1 ? cells[i] : cells[i] % slots;
      const int64_t cy = dim == 1 ? 0 : cells[i] / slots;
      q.anchor = {cx * side, cy * side};
      fam.cubes.push_back(q);
    }
  } else {
    // Window from snug (dense packings) to roomy (sparse ones).
    const double loose = 1.2 + 2.8 * rng.uniform01();
    int64_t span = static_cast<int64_t>(static_cast<double>(side) *
                                        std::ceil(std::sqrt(static_cast<double>(target))) * loose) +
                   side;
    span = std::max(span, 2 * side);
    int attempts = 0;
    while (static_cast<int64_t>(fam.cubes.size()) < target && attempts < 4000) {
      ++attempts;
      Cube q;
      q.dim = dim;
      q.scale_exp = k0;
      q.resolution_exp = m;
      q.anchor = {rng.range(0, span - side), dim == 2 ? rng.range(0, span - side) : 0};
      bool ok = true;
      for (const Cube& c : fam.cubes)
        if (!cubes_disjoint(c, q)) { ok = false; break; }
      if (ok) fam.cubes.push_back(q);
    }
  }
  return fam;
}

/// Random complex piecewise-constant field on a box, block-constant at a
/// seeded dyadic scale. The block scale is drawn from a resolution-
/// independent range (for m >= 5), so the same seed denotes the same
/// function at different grid resolutions.
inline ScalarField random_field(Rng& rng, int dim, int m, const GridBox& box, double half_range = 1.0,
                                bool real_only = false) {
  CatalogParams p;
  p.num["seed"] = static_cast<double>(rng.raw() >> 1);
  const int bmax = std::min(m, 5);
  p.num["block_exp"] = static_cast<double>(rng.range(std::max(1, bmax - 3), bmax));
  p.num["half_range"] = half_range;
  p.num["real_only"] = real_only ? 1.0 : 0.0;
  return sample_catalog("random_piecewise", p, dim, m, box);
}

} // namespace bmolab
