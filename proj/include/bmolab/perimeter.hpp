#pragma once

// Indicator sets and the eps-sweep of the cube-oscillation functional,
// tracking convergence toward half the (capped) perimeter. Only the
// axis-parallel functional is computed; results carry that caveat.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "bmolab/field.hpp"
#include "bmolab/norms.hpp"

namespace bmolab {

enum class ShapeKind { axis_rect, union_of_rects, raster_mask };

struct RectSpec {
  double x0 = 0.0, y0 = 0.0, w = 0.0, h = 0.0;
};

struct IndicatorSet {
  ShapeKind kind = ShapeKind::axis_rect;
  std::vector<RectSpec> rects;                 // axis_rect uses rects[0]
  std::vector<std::vector<double>> mask;       // {0,1} rows, row 0 = lowest y band
  RectSpec mask_region;                        // where the mask is placed
  std::optional<double> exact_perimeter;

  static IndicatorSet axis_rect(double w, double h, double x0 = 0.0, double y0 = 0.0) {
    if (w <= 0.0 || h <= 0.0) throw std::invalid_argument("axis_rect: sides must be positive");
    IndicatorSet a;
    a.kind = ShapeKind::axis_rect;
    a.rects.push_back({x0, y0, w, h});
    a.exact_perimeter = 2.0 * (w + h);
    return a;
  }

  static IndicatorSet union_of_rects(std::vector<RectSpec> rs, std::optional<double> perimeter = std::nullopt) {
    if (rs.empty()) throw std::invalid_argument("union_of_rects: empty set");
    IndicatorSet a;
    a.kind = ShapeKind::union_of_rects;
    a.rects = std::move(rs);
    a.exact_perimeter = perimeter;
    return a;
  }

  static IndicatorSet raster_mask(std::vector<std::vector<double>> m, RectSpec region,
                                  std::optional<double> perimeter = std::nullopt) {
    if (m.empty() || m[0].empty()) throw std::invalid_argument("raster_mask: empty mask");
    for (const auto& row : m) {
      if (row.size() != m[0].size()) throw std::invalid_argument("raster_mask: ragged rows");
      for (double v : row)
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("raster_mask: values must be 0 or 1");
    }
    IndicatorSet a;
    a.kind = ShapeKind::raster_mask;
    a.mask = std::move(m);
    a.mask_region = region;
    a.exact_perimeter = perimeter;
    return a;
  }

  bool contains(double x, double y) const {
    switch (kind) {
      case ShapeKind::axis_rect:
      case ShapeKind::union_of_rects:
        for (const RectSpec& r : rects)
          if (x >= r.x0 && x < r.x0 + r.w && y >= r.y0 && y < r.y0 + r.h) return true;
        return false;
      case ShapeKind::raster_mask: {
        const RectSpec& r = mask_region;
        if (x < r.x0 || x >= r.x0 + r.w || y < r.y0 || y >= r.y0 + r.h) return false;
        const auto rows = static_cast<int64_t>(mask.size());
        const auto cols = static_cast<int64_t>(mask[0].size());
        const auto col = std::min<int64_t>(cols - 1, static_cast<int64_t>((x - r.x0) / r.w * static_cast<double>(cols)));
        const auto row = std::min<int64_t>(rows - 1, static_cast<int64_t>((y - r.y0) / r.h * static_cast<double>(rows)));
        return mask[static_cast<size_t>(row)][static_cast<size_t>(col)] != 0.0;
      }
    }
    return false;
  }

  /// Bounding rectangle of the set (for window sizing).
  RectSpec bounds() const {
    if (kind == ShapeKind::raster_mask) return mask_region;
    double x0 = rects[0].x0, y0 = rects[0].y0;
    double x1 = rects[0].x0 + rects[0].w, y1 = rects[0].y0 + rects[0].h;
    for (const RectSpec& r : rects) {
      x0 = std::min(x0, r.x0);
      y0 = std::min(y0, r.y0);
      x1 = std::max(x1, r.x0 + r.w);
      y1 = std::max(y1, r.y0 + r.h);
    }
    return {x0, y0, x1 - x0, y1 - y0};
  }
};

/// Midpoint indicator sampling of A on an m-grid over `window`. Errors when
/// the discretization is empty.
inline ScalarField indicator_field(const IndicatorSet& A, int m, const GridBox& window) {
  GridBox b = window;
  b.resolution_exp = m;
  b.validate();
  const int64_t nx = b.extent[0], ny = b.dim == 2 ? b.extent[1] : 1;
  std::vector<Complex> vals(static_cast<size_t>(nx * ny));
  const double h = b.cell_side();
  bool any = false;
  for (int64_t ly = 0; ly < ny; ++ly) {
    const double y = b.dim == 2 ? (static_cast<double>(b.origin[1] + ly) + 0.5) * h : 0.0;
    for (int64_t lx = 0; lx < nx; ++lx) {
      const double x = (static_cast<double>(b.origin[0] + lx) + 0.5) * h;
      const bool in = A.contains(x, y);
      any = any || in;
      vals[static_cast<size_t>(ly * nx + lx)] = Complex(in ? 1.0 : 0.0, 0.0);
    }
  }
  if (!any) throw std::invalid_argument("indicator_field: empty discretized set");
  return ScalarField(b, std::move(vals));
}

/// Window around A padded by at least one unit, snapped to whole units.
inline GridBox sweep_window(const IndicatorSet& A, int m) {
  const RectSpec b = A.bounds();
  const int64_t lo_x = static_cast<int64_t>(std::floor(b.x0)) - 1;
  const int64_t lo_y = static_cast<int64_t>(std::floor(b.y0)) - 1;
  const int64_t hi_x = static_cast<int64_t>(std::ceil(b.x0 + b.w)) + 1;
  const int64_t hi_y = static_cast<int64_t>(std::ceil(b.y0 + b.h)) + 1;
  return unit_window(2, m, {lo_x, lo_y}, {hi_x - lo_x, hi_y - lo_y});
}

struct SweepResult {
  std::vector<EpsReport> per_k;
  std::optional<double> target;    // 0.5 * min(1, P(A)), when P is known
  std::optional<double> rel_error; // at the finest k
  std::string caveat;
};

inline const char* kSweepCaveat =
    "axis-parallel cube functional; the isotropic (rotated-cube) variant is not computed";

/// Per-scale sweep of the functional on the indicator of A over k_lo..k_hi.
inline SweepResult eps_sweep(const IndicatorSet& A, int m, int k_lo, int k_hi, const SolverPolicy& policy = {}) {
  if (k_lo < 1 || k_hi > m || k_lo > k_hi) throw std::invalid_argument("eps_sweep: bad k range");
  const GridBox window = sweep_window(A, m);
  const ScalarField chi = indicator_field(A, m, window);
  PrefixTable pre(chi);
  SweepResult out;
  out.caveat = kSweepCaveat;
  for (int k = k_lo; k <= k_hi; ++k) out.per_k.push_back(eps_functional(chi, pre, k, policy));
  if (A.exact_perimeter) {
    out.target = 0.5 * std::min(1.0, *A.exact_perimeter);
    if (*out.target > 0.0) out.rel_error = std::abs(out.per_k.back().value - *out.target) / *out.target;
  }
  return out;
}

} // namespace bmolab
