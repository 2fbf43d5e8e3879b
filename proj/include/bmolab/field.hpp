#pragma once

// Complex-valued piecewise-constant fields on dyadic grids.
//
// A field holds one complex value per lattice cell and is immutable after
// construction. The cell model makes integrals of catalog step functions
// exact: integration is a plain sum of cell values times cell volume,
// accelerated by inclusive prefix tables.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bmolab/geometry.hpp"
#include "bmolab/rng.hpp"

namespace bmolab {

using Complex = std::complex<double>;

class ScalarField {
public:
  ScalarField(GridBox box, std::vector<Complex> values) : box_(box), values_(std::move(values)) {
    box_.validate();
    if (static_cast<int64_t>(values_.size()) != box_.cell_count())
      throw std::invalid_argument("ScalarField: value count does not match box");
    real_ = true;
    binary01_ = true;
    for (const Complex& v : values_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("ScalarField: non-finite value");
      if (v.imag() != 0.0) real_ = false;
      if (v != Complex(0.0, 0.0) && v != Complex(1.0, 0.0)) binary01_ = false;
    }
  }

  const GridBox& box() const { return box_; }
  int dim() const { return box_.dim; }
  int resolution_exp() const { return box_.resolution_exp; }
  const std::vector<Complex>& values() const { return values_; }
  bool is_real() const { return real_; }
  bool is_binary01() const { return binary01_; }

  /// Linear index of the cell with absolute lattice coordinates (ix, iy).
  size_t index(int64_t ix, int64_t iy = 0) const {
    const int64_t lx = ix - box_.origin[0];
    const int64_t ly = box_.dim == 2 ? iy - box_.origin[1] : 0;
    return static_cast<size_t>(ly * box_.extent[0] + lx);
  }

  Complex at(int64_t ix, int64_t iy = 0) const { return values_[index(ix, iy)]; }

  /// Relabel the lattice so the field represents x -> f(2^L x). The values
  /// and cell indices are untouched; only the physical cell size shrinks.
  ScalarField dilated_argument(int L) const {
    if (L < 0) throw std::invalid_argument("dilated_argument: L must be >= 0");
    GridBox b = box_;
    b.resolution_exp += L;
    b.validate();
    return ScalarField(b, values_);
  }

  /// Zero-pad into a larger box on the same lattice.
  ScalarField embedded(const GridBox& target) const {
    if (target.dim != box_.dim || target.resolution_exp != box_.resolution_exp)
      throw std::invalid_argument("embedded: lattice mismatch");
    if (!target.contains_cell_range(box_.origin, {box_.origin[0] + box_.extent[0],
                                                  box_.dim == 2 ? box_.origin[1] + box_.extent[1] : 1}))
      throw std::invalid_argument("embedded: target does not contain the field box");
    std::vector<Complex> vals(static_cast<size_t>(target.cell_count()), Complex(0.0, 0.0));
    const int64_t tnx = target.extent[0];
    for (int64_t ly = 0; ly < (box_.dim == 2 ? box_.extent[1] : 1); ++ly)
      for (int64_t lx = 0; lx < box_.extent[0]; ++lx) {
        const int64_t tx = box_.origin[0] + lx - target.origin[0];
        const int64_t ty = box_.dim == 2 ? box_.origin[1] + ly - target.origin[1] : 0;
        vals[static_cast<size_t>(ty * tnx + tx)] = values_[static_cast<size_t>(ly * box_.extent[0] + lx)];
      }
    return ScalarField(target, std::move(vals));
  }

private:
  GridBox box_;
  std::vector<Complex> values_;
  bool real_ = true;
  bool binary01_ = true;
};

inline ScalarField field_map(const ScalarField& f, const std::function<Complex(Complex)>& g) {
  std::vector<Complex> vals(f.values().size());
  for (size_t i = 0; i < vals.size(); ++i) vals[i] = g(f.values()[i]);
  return ScalarField(f.box(), std::move(vals)); // ctor rejects non-finite outputs
}

inline ScalarField field_linear(Complex a, const ScalarField& f, Complex b, const ScalarField& g) {
  if (!(f.box() == g.box())) throw std::invalid_argument("field_linear: box mismatch");
  std::vector<Complex> vals(f.values().size());
  for (size_t i = 0; i < vals.size(); ++i) vals[i] = a * f.values()[i] + b * g.values()[i];
  return ScalarField(f.box(), std::move(vals));
}

inline ScalarField field_scale(Complex a, const ScalarField& f) {
  std::vector<Complex> vals(f.values().size());
  for (size_t i = 0; i < vals.size(); ++i) vals[i] = a * f.values()[i];
  return ScalarField(f.box(), std::move(vals));
}

// ---------------------------------------------------------------------------
// Integration

namespace detail {
inline void check_cell_range(const GridBox& box, const std::array<int64_t, 2>& lo, const std::array<int64_t, 2>& hi) {
  for (int d = 0; d < box.dim; ++d)
    if (lo[d] >= hi[d]) throw std::invalid_argument("integrate: empty or inverted cell range");
  if (!box.contains_cell_range(lo, hi)) throw std::out_of_range("integrate: region outside the field box");
}
} // namespace detail

/// Exact sum of cell values times cell volume over a half-open cell range.
inline Complex integrate_cells(const ScalarField& f, std::array<int64_t, 2> lo, std::array<int64_t, 2> hi) {
  if (f.dim() == 1) { lo[1] = 0; hi[1] = 1; }
  detail::check_cell_range(f.box(), lo, hi);
  Complex s(0.0, 0.0);
  for (int64_t iy = lo[1]; iy < hi[1]; ++iy)
    for (int64_t ix = lo[0]; ix < hi[0]; ++ix) s += f.at(ix, iy);
  return s * f.box().cell_volume();
}

inline Complex integrate(const ScalarField& f, const Cube& q) {
  if (q.resolution_exp != f.resolution_exp() || q.dim != f.dim())
    throw std::invalid_argument("integrate: cube lattice mismatch");
  return integrate_cells(f, q.anchor, q.upper());
}

inline Complex integrate(const ScalarField& f, const GridBox& region) {
  if (region.resolution_exp != f.resolution_exp() || region.dim != f.dim())
    throw std::invalid_argument("integrate: region lattice mismatch");
  return integrate_cells(f, region.origin,
                         {region.origin[0] + region.extent[0],
                          region.dim == 2 ? region.origin[1] + region.extent[1] : 1});
}

/// Inclusive prefix sums of values and of |values| over a field's box.
/// Imaginary sums are stored only when the field has imaginary mass.
class PrefixTable {
public:
  explicit PrefixTable(const ScalarField& f) : box_(f.box()), real_(f.is_real()) {
    const int64_t nx = box_.extent[0];
    const int64_t ny = box_.dim == 2 ? box_.extent[1] : 1;
    const size_t n = static_cast<size_t>((nx + 1) * (ny + 1));
    sum_re_.assign(n, 0.0);
    sum_abs_.assign(n, 0.0);
    if (!real_) sum_im_.assign(n, 0.0);
    for (int64_t ly = 0; ly < ny; ++ly) {
      for (int64_t lx = 0; lx < nx; ++lx) {
        const Complex v = f.values()[static_cast<size_t>(ly * nx + lx)];
        const size_t i = id(lx + 1, ly + 1), l = id(lx, ly + 1), u = id(lx + 1, ly), lu = id(lx, ly);
        sum_re_[i] = v.real() + sum_re_[l] + sum_re_[u] - sum_re_[lu];
        sum_abs_[i] = std::abs(v) + sum_abs_[l] + sum_abs_[u] - sum_abs_[lu];
        if (!real_) sum_im_[i] = v.imag() + sum_im_[l] + sum_im_[u] - sum_im_[lu];
      }
    }
  }

  const GridBox& box() const { return box_; }

  /// Sum of values over a half-open cell range (absolute coordinates).
  Complex cell_sum(std::array<int64_t, 2> lo, std::array<int64_t, 2> hi) const {
    if (box_.dim == 1) { lo[1] = 0; hi[1] = 1; }
    detail::check_cell_range(box_, lo, hi);
    return Complex(rect(sum_re_, lo, hi), real_ ? 0.0 : rect(sum_im_, lo, hi));
  }

  double cell_abs_sum(std::array<int64_t, 2> lo, std::array<int64_t, 2> hi) const {
    if (box_.dim == 1) { lo[1] = 0; hi[1] = 1; }
    detail::check_cell_range(box_, lo, hi);
    return rect(sum_abs_, lo, hi);
  }

  Complex integrate(std::array<int64_t, 2> lo, std::array<int64_t, 2> hi) const {
    return cell_sum(lo, hi) * box_.cell_volume();
  }
  Complex integrate(const Cube& q) const { return cell_sum(q.anchor, q.upper()) * box_.cell_volume(); }
  double integrate_abs(const Cube& q) const { return cell_abs_sum(q.anchor, q.upper()) * box_.cell_volume(); }

private:
  size_t id(int64_t lx, int64_t ly) const { return static_cast<size_t>(ly * (box_.extent[0] + 1) + lx); }

  double rect(const std::vector<double>& s, const std::array<int64_t, 2>& lo, const std::array<int64_t, 2>& hi) const {
    const int64_t x0 = lo[0] - box_.origin[0], x1 = hi[0] - box_.origin[0];
    const int64_t y0 = box_.dim == 2 ? lo[1] - box_.origin[1] : 0;
    const int64_t y1 = box_.dim == 2 ? hi[1] - box_.origin[1] : 1;
    return s[id(x1, y1)] - s[id(x0, y1)] - s[id(x1, y0)] + s[id(x0, y0)];
  }

  GridBox box_;
  bool real_;
  std::vector<double> sum_re_, sum_im_, sum_abs_;
};

// ---------------------------------------------------------------------------
// Catalog of sample functions

struct CatalogParams {
  std::map<std::string, double> num;
  std::map<std::string, std::string> str;

  double get(const std::string& key, double fallback) const {
    auto it = num.find(key);
    return it == num.end() ? fallback : it->second;
  }
  double require(const std::string& key) const {
    auto it = num.find(key);
    if (it == num.end()) throw std::invalid_argument("catalog params: missing '" + key + "'");
    return it->second;
  }
  std::string get_str(const std::string& key, const std::string& fallback) const {
    auto it = str.find(key);
    return it == str.end() ? fallback : it->second;
  }
};

namespace profile {

/// Cubic smoothstep: 1 on (-inf,-1], 0 on [0,inf), C^1 transition between.
inline double step_down(double t) {
  if (t <= -1.0) return 1.0;
  if (t >= 0.0) return 0.0;
  const double s = t + 1.0; // in (0,1)
  return 1.0 - (3.0 * s * s - 2.0 * s * s * s);
}

/// Radial log-profile bump: 1 for r <= s/j, 0 for r >= s/2, values in [0,1].
inline double theta_j(double r, int j, double scale) {
  if (j < 3) throw std::invalid_argument("theta_j: requires j >= 3");
  if (r <= 0.0) return 1.0;
  const double t = std::log2(2.0 * r / scale) / std::log2(j / 2.0);
  return step_down(t);
}

/// Max |gradient| of the theta_j profile (transition slope 3/2 at mid-step).
inline double theta_j_lipschitz(int j, double scale) {
  // The profile varies only on s/j < r < s/2; |d theta/dr| <= 1.5 / (ln2 * r * log2(j/2)).
  return 1.5 / (std::log(2.0) * (scale / j) * std::log2(j / 2.0));
}

/// 1-d plateau profile: 0 outside (1/8, 3/4), 1 on [1/4, 1/2], C^1 ramps.
inline double plateau(double t) {
  if (t <= 0.125 || t >= 0.75) return 0.0;
  if (t < 0.25) return 1.0 - step_down((t - 0.25) / 0.125);
  if (t <= 0.5) return 1.0;
  return step_down((t - 0.5) / 0.25 - 1.0);
}

} // namespace profile

namespace detail {

inline std::vector<std::vector<double>> read_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("raster: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double x;
    while (ls >> x) row.push_back(x);
    if (!ls.eof()) throw std::invalid_argument("raster: non-numeric token in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("raster: empty file '" + path + "'");
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) throw std::invalid_argument("raster: ragged rows in '" + path + "'");
  return rows;
}

} // namespace detail

/// Midpoint-sample a named catalog function over `box`. Deterministic for a
/// fixed (name, params, seed).
inline ScalarField sample_catalog(const std::string& name, const CatalogParams& params, int dim, int m,
                                  const GridBox& box) {
  GridBox b = box;
  b.dim = dim;
  b.resolution_exp = m;
  if (dim == 1) b.extent[1] = 1;
  b.validate();

  const int64_t nx = b.extent[0];
  const int64_t ny = dim == 2 ? b.extent[1] : 1;
  std::vector<Complex> vals(static_cast<size_t>(nx * ny));
  const double h = b.cell_side();

  auto fill_midpoint = [&](const std::function<Complex(double, double)>& fn) {
    for (int64_t ly = 0; ly < ny; ++ly) {
      const double y = dim == 2 ? (static_cast<double>(b.origin[1] + ly) + 0.5) * h : 0.0;
      for (int64_t lx = 0; lx < nx; ++lx) {
        const double x = (static_cast<double>(b.origin[0] + lx) + 0.5) * h;
        vals[static_cast<size_t>(ly * nx + lx)] = fn(x, y);
      }
    }
  };

  if (name == "constant") {
    const Complex c(params.get("c_re", params.get("c", 0.0)), params.get("c_im", 0.0));
    std::fill(vals.begin(), vals.end(), c);
  } else if (name == "rect_indicator") {
    const double x0 = params.get("x0", 0.0), y0 = params.get("y0", 0.0);
    const double w = params.require("w");
    const double hgt = dim == 2 ? params.require("h") : 1.0;
    if (w <= 0.0 || hgt <= 0.0) throw std::invalid_argument("rect_indicator: sides must be positive");
    fill_midpoint([&](double x, double y) {
      const bool in = x >= x0 && x < x0 + w && (dim == 1 || (y >= y0 && y < y0 + hgt));
      return Complex(in ? 1.0 : 0.0, 0.0);
    });
  } else if (name == "checkerboard_eta") {
    // Indicator of the lower-left quarter of every unit cell.
    fill_midpoint([&](double x, double y) {
      const double fx = x - std::floor(x);
      const double fy = dim == 2 ? y - std::floor(y) : 0.0;
      return Complex(fx < 0.5 && fy < 0.5 ? 1.0 : 0.0, 0.0);
    });
  } else if (name == "theta_j") {
    const int j = static_cast<int>(params.require("j"));
    if (j < 3) throw std::invalid_argument("theta_j: requires j >= 3");
    const double cx = params.get("center_x", 0.0), cy = params.get("center_y", 0.0);
    const double scale = params.get("scale", 1.0);
    fill_midpoint([&](double x, double y) {
      const double dx = x - cx, dy = dim == 2 ? y - cy : 0.0;
      return Complex(profile::theta_j(std::hypot(dx, dy), j, scale), 0.0);
    });
  } else if (name == "phi_bump_array") {
    // Sum of translated theta_j bumps along the diagonal, disjoint supports.
    const int j = static_cast<int>(params.require("j"));
    const double scale = params.get("scale", 1.0);
    const int count = static_cast<int>(params.get("count", 1.0));
    const double spacing = params.get("spacing", 16.0);
    const double bx = params.get("base_x", 0.0), by = params.get("base_y", 0.0);
    if (count < 1) throw std::invalid_argument("phi_bump_array: count must be >= 1");
    if (count > 1 && spacing < scale) throw std::invalid_argument("phi_bump_array: spacing under bump diameter");
    fill_midpoint([&](double x, double y) {
      double s = 0.0;
      for (int i = 0; i < count; ++i) {
        const double cx = bx + spacing * i;
        const double cy = by + spacing * i;
        const double dx = x - cx, dy = dim == 2 ? y - cy : 0.0;
        s += profile::theta_j(std::hypot(dx, dy), j, scale);
      }
      return Complex(s, 0.0);
    });
  } else if (name == "log_singularity") {
    const double cx = params.get("x0", 0.0), cy = params.get("y0", 0.0);
    fill_midpoint([&](double x, double y) {
      const double dx = x - cx, dy = dim == 2 ? y - cy : 0.0;
      return Complex(std::log(std::hypot(dx, dy)), 0.0); // midpoints never hit a lattice corner
    });
  } else if (name == "random_piecewise") {
    const auto seed = static_cast<std::uint64_t>(params.get("seed", 1.0));
    const int block_exp = static_cast<int>(params.get("block_exp", static_cast<double>(m)));
    if (block_exp < 0 || block_exp > m) throw std::invalid_argument("random_piecewise: block_exp out of range");
    const double half = params.get("half_range", 1.0);
    const bool real_only = params.get("real_only", 0.0) != 0.0;
    const int64_t blk = pow2i(m - block_exp);
    // One value per block of blk x blk cells, assigned in block scan order.
    const int64_t bx0 = b.origin[0] >= 0 ? b.origin[0] / blk : (b.origin[0] - blk + 1) / blk;
    const int64_t by0 = dim == 2 ? (b.origin[1] >= 0 ? b.origin[1] / blk : (b.origin[1] - blk + 1) / blk) : 0;
    const int64_t bnx = (b.origin[0] + nx - 1) / blk - bx0 + 1;
    const int64_t bny = dim == 2 ? (b.origin[1] + ny - 1) / blk - by0 + 1 : 1;
    Rng rng(seed);
    std::vector<Complex> block_vals(static_cast<size_t>(bnx * bny));
    for (auto& v : block_vals) {
      const double re = rng.uniform(-half, half);
      const double im = real_only ? 0.0 : rng.uniform(-half, half);
      v = Complex(re, im);
    }
    for (int64_t ly = 0; ly < ny; ++ly) {
      const int64_t byi = dim == 2 ? ((b.origin[1] + ly) >= 0 ? (b.origin[1] + ly) / blk
                                                              : (b.origin[1] + ly - blk + 1) / blk) - by0
                                   : 0;
      for (int64_t lx = 0; lx < nx; ++lx) {
        const int64_t bxi = ((b.origin[0] + lx) >= 0 ? (b.origin[0] + lx) / blk
                                                     : (b.origin[0] + lx - blk + 1) / blk) - bx0;
        vals[static_cast<size_t>(ly * nx + lx)] = block_vals[static_cast<size_t>(byi * bnx + bxi)];
      }
    }
  } else if (name == "raster") {
    const auto re_rows = detail::read_raster(params.str.count("path") ? params.str.at("path")
                                                                      : throw std::invalid_argument("raster: missing 'path'"));
    std::vector<std::vector<double>> im_rows;
    if (params.str.count("path_im")) {
      im_rows = detail::read_raster(params.str.at("path_im"));
      if (im_rows.size() != re_rows.size() || im_rows[0].size() != re_rows[0].size())
        throw std::invalid_argument("raster: re/im shapes differ");
    }
    const int64_t rnx = static_cast<int64_t>(re_rows[0].size());
    const int64_t rny = static_cast<int64_t>(re_rows.size());
    if (dim == 1 && rny != 1) throw std::invalid_argument("raster: 1-d field needs a single-row raster");
    b.extent[0] = rnx;
    b.extent[1] = dim == 2 ? rny : 1;
    b.validate();
    vals.assign(static_cast<size_t>(rnx * (dim == 2 ? rny : 1)), Complex(0, 0));
    for (int64_t ly = 0; ly < (dim == 2 ? rny : 1); ++ly)
      for (int64_t lx = 0; lx < rnx; ++lx)
        vals[static_cast<size_t>(ly * rnx + lx)] =
            Complex(re_rows[static_cast<size_t>(ly)][static_cast<size_t>(lx)],
                    im_rows.empty() ? 0.0 : im_rows[static_cast<size_t>(ly)][static_cast<size_t>(lx)]);
  } else {
    throw std::invalid_argument("sample_catalog: unknown catalog id '" + name + "'");
  }

  return ScalarField(b, std::move(vals));
}

} // namespace bmolab
