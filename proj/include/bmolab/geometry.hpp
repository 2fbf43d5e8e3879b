#pragma once

// Integer lattice geometry for dyadic grids.
//
// Every box and cube lives on a fine lattice with cell side 2^-m (box
// units). Coordinates are stored as signed cell counts, so containment
// and disjointness are exact integer tests; no floating-point geometry.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmolab {

using std::int64_t;

inline int64_t pow2i(int e) {
  if (e < 0 || e > 62) throw std::invalid_argument("pow2i: exponent " + std::to_string(e) + " out of range");
  return int64_t{1} << e;
}

/// Axis-aligned box of whole cells. `origin` is the lower corner in cell
/// units (may be negative), `extent` the per-axis cell counts.
struct GridBox {
  int dim = 2;                        // n, 1 or 2
  int resolution_exp = 1;             // m, cell side 2^-m
  std::array<int64_t, 2> origin{0, 0};
  std::array<int64_t, 2> extent{0, 0};

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("GridBox: dim must be 1 or 2");
    if (resolution_exp < 1 || resolution_exp > 40) throw std::invalid_argument("GridBox: resolution_exp out of range");
    for (int d = 0; d < dim; ++d)
      if (extent[d] <= 0) throw std::invalid_argument("GridBox: extent must be positive");
    if (dim == 1 && extent[1] != 1) throw std::invalid_argument("GridBox: 1-d box must have extent[1] == 1");
  }

  int64_t cell_count() const { return dim == 1 ? extent[0] : extent[0] * extent[1]; }
  double cell_side() const { return std::ldexp(1.0, -resolution_exp); }
  double cell_volume() const { return dim == 1 ? cell_side() : cell_side() * cell_side(); }

  /// Physical coordinate of a lattice point given in cells.
  double to_phys(int64_t cells) const { return std::ldexp(static_cast<double>(cells), -resolution_exp); }

  bool contains_cell_range(const std::array<int64_t, 2>& lo, const std::array<int64_t, 2>& hi) const {
    for (int d = 0; d < dim; ++d)
      if (lo[d] < origin[d] || hi[d] > origin[d] + extent[d]) return false;
    return true;
  }

  bool operator==(const GridBox& o) const {
    return dim == o.dim && resolution_exp == o.resolution_exp && origin == o.origin &&
           (dim == 1 ? extent[0] == o.extent[0] : extent == o.extent);
  }
};

/// Convenience constructor: the unit box [0,1)^n at resolution m.
inline GridBox unit_box(int dim, int m) {
  GridBox b;
  b.dim = dim;
  b.resolution_exp = m;
  b.origin = {0, 0};
  b.extent = {pow2i(m), dim == 2 ? pow2i(m) : 1};
  b.validate();
  return b;
}

/// Box spanning [lo, lo+units) per axis, sides given in whole box units.
inline GridBox unit_window(int dim, int m, std::array<int64_t, 2> lo_units, std::array<int64_t, 2> side_units) {
  GridBox b;
  b.dim = dim;
  b.resolution_exp = m;
  const int64_t c = pow2i(m);
  b.origin = {lo_units[0] * c, dim == 2 ? lo_units[1] * c : 0};
  b.extent = {side_units[0] * c, dim == 2 ? side_units[1] * c : 1};
  b.validate();
  return b;
}

/// Open axis-aligned cube of side 2^-k, anchored on the fine lattice of a
/// fixed resolution m >= k. Anchor is the lower corner in cell units.
struct Cube {
  int dim = 2;
  int scale_exp = 1;      // k, side 2^-k
  int resolution_exp = 1; // m of the ambient lattice
  std::array<int64_t, 2> anchor{0, 0};

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Cube: dim must be 1 or 2");
    if (scale_exp > resolution_exp) throw std::invalid_argument("Cube: scale finer than lattice (k > m)");
  }

  int64_t side_cells() const { return pow2i(resolution_exp - scale_exp); }
  double side() const { return std::ldexp(1.0, -scale_exp); }
  double volume() const { return dim == 1 ? side() : side() * side(); }

  std::array<int64_t, 2> upper() const {
    const int64_t s = side_cells();
    return {anchor[0] + s, dim == 2 ? anchor[1] + s : anchor[1] + 1};
  }

  bool operator==(const Cube& o) const {
    return dim == o.dim && scale_exp == o.scale_exp && resolution_exp == o.resolution_exp && anchor == o.anchor;
  }
  bool operator<(const Cube& o) const { // lexicographic by anchor
    if (anchor[0] != o.anchor[0]) return anchor[0] < o.anchor[0];
    return anchor[1] < o.anchor[1];
  }
};

/// The same cube re-anchored on a lattice `levels` steps finer.
inline Cube refined(const Cube& q, int levels) {
  if (levels < 0) throw std::invalid_argument("refined: levels must be >= 0");
  Cube out = q;
  out.resolution_exp += levels;
  out.anchor = {q.anchor[0] * pow2i(levels), q.dim == 2 ? q.anchor[1] * pow2i(levels) : 0};
  return out;
}

/// Open cubes are disjoint iff they are disjoint as half-open lattice boxes.
inline bool cubes_disjoint(const Cube& a, const Cube& b) {
  const int64_t sa = a.side_cells(), sb = b.side_cells();
  for (int d = 0; d < a.dim; ++d) {
    const int64_t alo = a.anchor[d], blo = b.anchor[d];
    if (alo + sa <= blo || blo + sb <= alo) return true;
  }
  return false;
}

inline bool box_contains_cube(const GridBox& box, const Cube& q) {
  return box.contains_cell_range(q.anchor, q.upper());
}

inline bool cube_contains_cube(const Cube& outer, const Cube& inner) {
  const auto ou = outer.upper(), iu = inner.upper();
  for (int d = 0; d < outer.dim; ++d)
    if (inner.anchor[d] < outer.anchor[d] || iu[d] > ou[d]) return false;
  return true;
}

/// Pairwise-disjoint equal-scale cubes under a cardinality budget.
struct CubeFamily {
  std::vector<Cube> cubes;
  int64_t budget = 1; // K

  /// Throws if scales are mixed, cubes overlap, or the budget is exceeded.
  void validate(bool enforce_budget = true) const {
    if (budget < 1) throw std::invalid_argument("CubeFamily: budget must be >= 1");
    if (enforce_budget && static_cast<int64_t>(cubes.size()) > budget)
      throw std::invalid_argument("CubeFamily: cardinality exceeds budget");
    for (size_t i = 0; i < cubes.size(); ++i) {
      if (cubes[i].scale_exp != cubes[0].scale_exp || cubes[i].resolution_exp != cubes[0].resolution_exp)
        throw std::invalid_argument("CubeFamily: mixed scales");
      for (size_t j = i + 1; j < cubes.size(); ++j)
        if (!cubes_disjoint(cubes[i], cubes[j])) throw std::invalid_argument("CubeFamily: overlapping cubes");
    }
  }
};

/// The budget 1/eps^(n-1) at eps = 2^-k.
inline int64_t eps_budget(int dim, int k) { return dim == 1 ? 1 : pow2i(k * (dim - 1)); }

} // namespace bmolab
