#pragma once

// Superposition maps g: C -> C, their composition with fields, and the
// verification gadgets: Lipschitz/modulus transfer bounds, the plateau
// gadget extracting |g(b)-g(a)| from composed-field oscillation, the
// checkerboard/bump witness for the affinity defect, and the classifier
// that predicts the mapping properties of T_g = g∘·.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bmolab/field.hpp"
#include "bmolab/norms.hpp"

namespace bmolab {

// ---------------------------------------------------------------------------
// GMap

enum class GKind { affine, abs, sin_c, clamp, bounded_step, floor_real, sqrt_abs, abs_sq, custom_table };

inline const char* gkind_name(GKind k) {
  switch (k) {
    case GKind::affine: return "affine";
    case GKind::abs: return "abs";
    case GKind::sin_c: return "sin_c";
    case GKind::clamp: return "clamp";
    case GKind::bounded_step: return "bounded_step";
    case GKind::floor_real: return "floor_real";
    case GKind::sqrt_abs: return "sqrt_abs";
    case GKind::abs_sq: return "abs_sq";
    case GKind::custom_table: return "custom_table";
  }
  return "?";
}

struct GMap {
  GKind kind = GKind::affine;
  Complex alpha{1.0, 0.0}; // affine slope
  Complex beta{0.0, 0.0};  // affine offset
  double radius = 1.0;     // clamp ball radius
  double height = 1.0;     // bounded_step jump height
  std::vector<std::pair<Complex, Complex>> table; // custom_table, nearest-neighbor

  // Declared metadata; the factories fill analytically known values, and
  // verify_metadata checks the declarations on a sample grid.
  std::optional<double> lipschitz;
  std::optional<double> sup_bound;
  bool uniformly_continuous_declared = false;

  Complex operator()(Complex z) const {
    switch (kind) {
      case GKind::affine: return alpha * z + beta;
      case GKind::abs: return Complex(std::abs(z), 0.0);
      case GKind::sin_c: return Complex(std::sin(z.real()), std::sin(z.imag()));
      case GKind::clamp: {
        const double r = std::abs(z);
        return r <= radius || r == 0.0 ? z : z * (radius / r);
      }
      case GKind::bounded_step: return Complex(z.real() >= 0.0 ? height : 0.0, 0.0);
      case GKind::floor_real: return Complex(std::floor(z.real()), 0.0);
      case GKind::sqrt_abs: return Complex(std::sqrt(std::abs(z)), 0.0);
      case GKind::abs_sq: return Complex(std::norm(z), 0.0);
      case GKind::custom_table: {
        if (table.empty()) throw std::invalid_argument("custom_table GMap has no entries");
        size_t best = 0;
        double bd = std::abs(z - table[0].first);
        for (size_t i = 1; i < table.size(); ++i) {
          const double d = std::abs(z - table[i].first);
          if (d < bd) { bd = d; best = i; }
        }
        return table[best].second;
      }
    }
    return z;
  }

  static GMap make_affine(Complex a, Complex b) {
    GMap g;
    g.kind = GKind::affine;
    g.alpha = a;
    g.beta = b;
    g.lipschitz = std::abs(a);
    if (std::abs(a) == 0.0) g.sup_bound = std::abs(b);
    g.uniformly_continuous_declared = true;
    return g;
  }
  static GMap make_abs() {
    GMap g;
    g.kind = GKind::abs;
    g.lipschitz = 1.0;
    g.uniformly_continuous_declared = true;
    return g;
  }
  static GMap make_sin_c() {
    GMap g;
    g.kind = GKind::sin_c;
    g.lipschitz = 1.0;
    g.sup_bound = std::sqrt(2.0);
    g.uniformly_continuous_declared = true;
    return g;
  }
  static GMap make_clamp(double r) {
    if (r <= 0.0) throw std::invalid_argument("clamp radius must be positive");
    GMap g;
    g.kind = GKind::clamp;
    g.radius = r;
    g.lipschitz = 1.0;
    g.sup_bound = r;
    g.uniformly_continuous_declared = true;
    return g;
  }
  static GMap make_bounded_step(double height = 1.0) {
    GMap g;
    g.kind = GKind::bounded_step;
    g.height = height;
    g.sup_bound = std::abs(height);
    return g;
  }
  static GMap make_floor_real() {
    GMap g;
    g.kind = GKind::floor_real;
    return g;
  }
  static GMap make_sqrt_abs() {
    GMap g;
    g.kind = GKind::sqrt_abs;
    g.uniformly_continuous_declared = true;
    return g;
  }
  static GMap make_abs_sq() {
    GMap g;
    g.kind = GKind::abs_sq;
    return g;
  }
  static GMap make_table(std::vector<std::pair<Complex, Complex>> entries) {
    GMap g;
    g.kind = GKind::custom_table;
    g.table = std::move(entries);
    return g;
  }
};

/// T_g(f) = g ∘ f, cell-wise; non-finite outputs are rejected by the field.
inline ScalarField apply(const GMap& g, const ScalarField& f) {
  return field_map(f, [&](Complex z) { return g(z); });
}

// ---------------------------------------------------------------------------
// Sample grids and metadata verification

namespace detail {

/// Bounded grid points plus long-range ray points, shared by the samplers.
inline std::vector<Complex> sample_points(double grid_half, int grid_n, int ray_scales) {
  std::vector<Complex> pts;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double x = -grid_half + 2.0 * grid_half * i / (grid_n - 1);
      const double y = -grid_half + 2.0 * grid_half * j / (grid_n - 1);
      pts.emplace_back(x, y);
    }
  static const Complex dirs[4] = {{1, 0}, {0, 1}, {std::sqrt(0.5), std::sqrt(0.5)}, {-std::sqrt(0.5), std::sqrt(0.5)}};
  for (int t = 1; t <= ray_scales; ++t)
    for (const Complex& d : dirs) {
      pts.push_back(d * std::ldexp(1.0, t));
      pts.push_back(d * (std::ldexp(1.0, t) + 1.0));
    }
  return pts;
}

} // namespace detail

/// Checks the declared Lipschitz constant and sup bound on a fixed sample
/// grid (tolerance 1e-9). Throws when a declaration is violated.
inline void verify_metadata(const GMap& g) {
  const auto pts = detail::sample_points(4.0, 9, 10);
  const double tol = 1e-9;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Complex gi = g(pts[i]);
    if (g.sup_bound && std::abs(gi) > *g.sup_bound + tol)
      throw std::invalid_argument("verify_metadata: declared bound violated");
    if (g.lipschitz)
      for (size_t j = i + 1; j < pts.size(); ++j)
        if (std::abs(gi - g(pts[j])) > *g.lipschitz * std::abs(pts[i] - pts[j]) + tol)
          throw std::invalid_argument("verify_metadata: declared Lipschitz constant violated");
  }
}

// ---------------------------------------------------------------------------
// Modulus of continuity

enum class ModulusFamily { linear_cap, power_cap, table };

/// Nondecreasing concave modulus with w(0) = 0.
struct Modulus {
  ModulusFamily family = ModulusFamily::linear_cap;
  double L = 1.0;
  double B = std::numeric_limits<double>::infinity(); // cap
  double C = 1.0;
  double gamma = 0.5;
  std::vector<std::pair<double, double>> knots; // table: (t, w) with t ascending

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    switch (family) {
      case ModulusFamily::linear_cap: return std::min(L * t, B);
      case ModulusFamily::power_cap: return std::min(C * std::pow(t, gamma), B);
      case ModulusFamily::table: {
        if (knots.empty()) return 0.0;
        if (t >= knots.back().first) return knots.back().second;
        double t0 = 0.0, w0 = 0.0;
        for (const auto& [tk, wk] : knots) {
          if (t <= tk) return w0 + (wk - w0) * (t - t0) / (tk - t0);
          t0 = tk;
          w0 = wk;
        }
        return knots.back().second;
      }
    }
    return 0.0;
  }

  /// Shape check: w(0+)=0, nondecreasing, concave. Tables are checked by
  /// their knot slopes (the grid probe can miss a kink that sits on it).
  void validate_shape() const {
    if (family == ModulusFamily::power_cap && (gamma <= 0.0 || gamma > 1.0))
      throw std::invalid_argument("Modulus: power exponent must lie in (0,1]");
    if (family == ModulusFamily::table) {
      double t0 = 0.0, w0 = 0.0;
      double prev_slope = std::numeric_limits<double>::infinity();
      for (const auto& [tk, wk] : knots) {
        if (tk <= t0) throw std::invalid_argument("Modulus: table knots must be strictly increasing");
        if (wk + 1e-15 < w0) throw std::invalid_argument("Modulus: not nondecreasing");
        const double slope = (wk - w0) / (tk - t0);
        if (slope > prev_slope + 1e-12) throw std::invalid_argument("Modulus: not concave on the evaluation grid");
        prev_slope = slope;
        t0 = tk;
        w0 = wk;
      }
    }
    std::vector<double> ts;
    for (int t = -40; t <= 12; ++t) ts.push_back(std::ldexp(1.0, t));
    double prev = 0.0;
    for (double t : ts) {
      const double w = (*this)(t);
      if (w + 1e-15 < prev) throw std::invalid_argument("Modulus: not nondecreasing");
      const double mid = (*this)(t * 0.75); // between t/2 and t
      if (mid + 1e-12 < 0.5 * ((*this)(t * 0.5) + (*this)(t)))
        throw std::invalid_argument("Modulus: not concave on the evaluation grid");
      prev = w;
    }
    if ((*this)(std::ldexp(1.0, -40)) > 1e-6) throw std::invalid_argument("Modulus: w(0+) not 0");
  }
};

/// Verifies |g(x)-g(y)| <= w(|x-y|) + tol on the given value samples plus
/// the shared grid. Used as the precondition of the transfer checks.
inline bool modulus_dominates(const GMap& g, const Modulus& w, const std::vector<Complex>& values,
                              double tol = 1e-9) {
  std::vector<Complex> pts = detail::sample_points(2.0, 7, 4);
  pts.insert(pts.end(), values.begin(), values.end());
  if (pts.size() > 700) pts.resize(700);
  for (size_t i = 0; i < pts.size(); ++i) {
    const Complex gi = g(pts[i]);
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(gi - g(pts[j])) > w(std::abs(pts[i] - pts[j])) + tol) return false;
  }
  return true;
}

namespace detail {

inline std::vector<Complex> distinct_values(const ScalarField& f, size_t cap = 256) {
  std::vector<Complex> vals;
  for (const Complex& v : f.values()) {
    bool seen = false;
    for (const Complex& u : vals)
      if (u == v) { seen = true; break; }
    if (!seen) {
      vals.push_back(v);
      if (vals.size() >= cap) break;
    }
  }
  return vals;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Growth index

struct GrowthEstimate {
  double value = 0.0;     // max sampled (1+|x-y|)^{-1}|g(x)-g(y)|; a lower estimate
  bool divergent = false; // kept growing with the sample radius
  Complex witness_x, witness_y;
};

/// Samples sup (1+|x-y|)^{-1} |g(x)-g(y)| over a bounded grid plus rays of
/// radius 2^t; flags divergence when the per-scale maxima keep growing.
inline GrowthEstimate growth_index(const GMap& g, double grid_half = 4.0, int grid_n = 13, int ray_scales = 14) {
  GrowthEstimate est;
  auto consider = [&](Complex x, Complex y) {
    const double r = std::abs(g(x) - g(y)) / (1.0 + std::abs(x - y));
    if (r > est.value) {
      est.value = r;
      est.witness_x = x;
      est.witness_y = y;
    }
    return r;
  };
  const auto grid = detail::sample_points(grid_half, grid_n, 0);
  for (size_t i = 0; i < grid.size(); ++i)
    for (size_t j = i + 1; j < grid.size(); ++j) consider(grid[i], grid[j]);

  static const Complex dirs[4] = {{1, 0}, {0, 1}, {std::sqrt(0.5), std::sqrt(0.5)}, {0, -1}};
  std::vector<double> per_scale;
  for (int t = 0; t <= ray_scales; ++t) {
    const double r = std::ldexp(1.0, t);
    double scale_max = 0.0;
    for (const Complex& d : dirs) {
      scale_max = std::max(scale_max, consider(d * r, d * (r + 1.0)));
      scale_max = std::max(scale_max, consider(d * r, Complex(0, 0)));
      scale_max = std::max(scale_max, consider(d * r, d * (r * 0.5)));
    }
    per_scale.push_back(scale_max);
  }
  const size_t s = per_scale.size();
  if (s >= 5) {
    const double tail = per_scale[s - 1];
    const double mid = std::max(per_scale[s - 5], 1e-300);
    est.divergent = tail > 1.5 * mid && tail > 1.0;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Norm-level transfer checks

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||g∘f||_B <= 2 Lip(g) ||f||_B + |g(0)|. The f-side per-scale values are
/// refined with the composed side's achieving families, so both sides are
/// certified lower bounds computed over a common feasible set.
inline BoundCheck lipschitz_bound_check(const GMap& g, const ScalarField& f, NormMode mode = NormMode::q0,
                                        const SolverPolicy& policy = {}, double slack = 1e-9) {
  if (!g.lipschitz) throw std::invalid_argument("lipschitz_bound_check: map lacks a declared Lipschitz constant");
  verify_metadata(g);
  const double L = *g.lipschitz;
  const ScalarField gf = apply(g, f);

  NormReport lhs_rep = b_norm(gf, mode, policy);
  PrefixTable pre_f(f);
  double l1_f;
  if (mode == NormMode::q0) {
    const auto& b = f.box();
    l1_f = pre_f.cell_abs_sum(b.origin, {b.origin[0] + b.extent[0], b.dim == 2 ? b.origin[1] + b.extent[1] : 1}) *
           b.cell_volume();
  } else {
    l1_f = detail::unit_cube_abs_sup(f, pre_f);
  }
  double sup_f = 0.0;
  for (const EpsReport& er : lhs_rep.per_k) {
    EpsReport fr = eps_functional(f, pre_f, er.k, policy, {er.family.cubes});
    sup_f = std::max(sup_f, fr.value);
  }

  BoundCheck out;
  out.lhs = lhs_rep.total;
  out.rhs = 2.0 * L * (l1_f + sup_f) + std::abs(g(Complex(0, 0)));
  out.holds = out.lhs <= out.rhs + slack;
  return out;
}

struct TransferCheck {
  double lhs = 0.0;
  double rhs_split = 0.0; // 2w(2 M(f,Q)) + w(2 M(h,Q))
  double rhs_small = 0.0; // 2w(avg_Q |h|)
  double rhs = 0.0;
  bool holds = false;
};

/// Oscillation transfer on one cube: the mean oscillation of
/// g∘(f+h) - g∘f over Q against the min of the two modulus bounds.
inline TransferCheck oscillation_transfer_check(const GMap& g, const Modulus& w, const ScalarField& f,
                                                const ScalarField& h, const Cube& q, double slack = 1e-9) {
  w.validate_shape();
  const ScalarField fh = field_linear(Complex(1, 0), f, Complex(1, 0), h);
  auto vals = detail::distinct_values(f, 128);
  const auto vals2 = detail::distinct_values(fh, 128);
  vals.insert(vals.end(), vals2.begin(), vals2.end());
  if (!modulus_dominates(g, w, vals)) throw std::invalid_argument("oscillation_transfer_check: modulus does not dominate g");

  const ScalarField gfh = apply(g, fh);
  const ScalarField gf = apply(g, f);
  const ScalarField diff = field_linear(Complex(1, 0), gfh, Complex(-1, 0), gf);

  PrefixTable pre_d(diff), pre_f(f), pre_h(h);
  TransferCheck out;
  out.lhs = mean_oscillation(diff, pre_d, q);
  const double mf = mean_oscillation(f, pre_f, q);
  const double mh = mean_oscillation(h, pre_h, q);
  const double avg_h = pre_h.integrate_abs(q) / q.volume();
  out.rhs_split = 2.0 * w(2.0 * mf) + w(2.0 * mh);
  out.rhs_small = 2.0 * w(avg_h);
  out.rhs = std::min(out.rhs_split, out.rhs_small);
  out.holds = out.lhs <= out.rhs + slack;
  return out;
}

struct ContinuityReport {
  double diff_norm = 0.0;    // ||T_g(f+h) - T_g f||_B
  double bound_total = 0.0;  // assembled per-scale + L1 bound
  double l1_lhs = 0.0, l1_rhs = 0.0;
  std::vector<double> per_k_lhs, per_k_rhs;
  double m_delta = 0.0;      // sup over k with 2^-k < delta of [f]_k
  double headline = 0.0;     // 2w(2 M_delta) + w(2 ||h||B)
  bool holds = false;
};

/// The continuity-at-f bound: every scale of ||T_g(f+h) - T_g f||_B is
/// dominated by the modulus expressions evaluated on the difference side's
/// achieving families.
inline ContinuityReport continuity_modulus_bound(const GMap& g, const Modulus& w, const ScalarField& f,
                                                 const ScalarField& h, NormMode mode = NormMode::q0,
                                                 const SolverPolicy& policy = {}, int delta_scale = 1,
                                                 double slack = 1e-9) {
  w.validate_shape();
  const ScalarField fh = field_linear(Complex(1, 0), f, Complex(1, 0), h);
  auto vals = detail::distinct_values(f, 128);
  const auto vals2 = detail::distinct_values(fh, 128);
  vals.insert(vals.end(), vals2.begin(), vals2.end());
  if (!modulus_dominates(g, w, vals)) throw std::invalid_argument("continuity_modulus_bound: modulus does not dominate g");

  const ScalarField diff = field_linear(Complex(1, 0), apply(g, fh), Complex(-1, 0), apply(g, f));
  const NormReport diff_rep = b_norm(diff, mode, policy);
  PrefixTable pre_f(f), pre_h(h);

  ContinuityReport out;
  out.diff_norm = diff_rep.total;
  const int n = f.dim();
  for (const EpsReport& er : diff_rep.per_k) {
    const double prefactor = n == 1 ? 1.0 : std::ldexp(1.0, -er.k * (n - 1));
    double sum_f = 0.0, sum_h = 0.0, sum_wh = 0.0;
    for (const Cube& q : er.family.cubes) {
      sum_f += mean_oscillation(f, pre_f, q);
      sum_h += mean_oscillation(h, pre_h, q);
      sum_wh += w(pre_h.integrate_abs(q) / q.volume());
    }
    const double rhs_split = 2.0 * w(2.0 * prefactor * sum_f) + w(2.0 * prefactor * sum_h);
    const double rhs_small = 2.0 * prefactor * sum_wh;
    out.per_k_lhs.push_back(er.value);
    out.per_k_rhs.push_back(std::min(rhs_split, rhs_small));
  }
  out.l1_lhs = diff_rep.l1_term;
  if (mode == NormMode::q0) {
    const auto& b = h.box();
    const double avg_h = pre_h.cell_abs_sum(b.origin, {b.origin[0] + b.extent[0], b.dim == 2 ? b.origin[1] + b.extent[1] : 1}) *
                         b.cell_volume();
    out.l1_rhs = w(avg_h);
  } else {
    out.l1_rhs = w(detail::unit_cube_abs_sup(h, pre_h));
  }

  double sup_rhs = 0.0;
  for (double r : out.per_k_rhs) sup_rhs = std::max(sup_rhs, r);
  out.bound_total = out.l1_rhs + sup_rhs;

  NormReport f_rep = b_norm(f, mode, policy);
  for (const EpsReport& er : f_rep.per_k)
    if (er.k > delta_scale) out.m_delta = std::max(out.m_delta, er.value);
  NormReport h_rep = b_norm(h, mode, policy);
  out.headline = 2.0 * w(2.0 * out.m_delta) + w(2.0 * h_rep.total);
  out.holds = out.diff_norm <= out.bound_total + slack;
  return out;
}

// ---------------------------------------------------------------------------
// Gadgets

/// Radial log-profile cutoff field on [-1/2,1/2)^n (1 inside radius 1/j,
/// 0 outside radius 1/2).
inline ScalarField theta_gadget(int j, int n, int m) {
  if (j < 3) throw std::invalid_argument("theta_gadget: requires j >= 3");
  CatalogParams p;
  p.num["j"] = j;
  GridBox box = unit_window(n, m, {-1, n == 2 ? -1 : 0}, {1, 1});
  // [-1/2, 1/2)^n: shift by half a unit
  box.origin = {-pow2i(m - 1), n == 2 ? -pow2i(m - 1) : 0};
  box.extent = {pow2i(m), n == 2 ? pow2i(m) : 1};
  return sample_catalog("theta_j", p, n, m, box);
}

struct PlateauGadget {
  ScalarField field;        // (b-a) * bump array + a * theta, on the unit box
  std::vector<Cube> cells;  // the 2^{j(n-1)} plateau cells Q_i
  Complex a, b;
  int j = 3;
};

/// Builds the two-plateau probe: inside each selected 2^-j cell the field
/// takes the value b on a fixed interior plateau and a on the rest, with a
/// smooth taper; theta raises the background to a inside the bump ball.
inline PlateauGadget make_plateau_gadget(Complex a, Complex b, int j, int n, int m) {
  if (j < 3) throw std::invalid_argument("make_plateau_gadget: requires j >= 3");
  if (m < j + 3) throw std::invalid_argument("make_plateau_gadget: needs m >= j+3 to resolve the plateau cells");
  if (n != 1 && n != 2) throw std::invalid_argument("make_plateau_gadget: dim must be 1 or 2");

  const GridBox box = unit_box(n, m);
  const double cx = 0.5, cy = n == 2 ? 0.5 : 0.0;
  const int64_t side = pow2i(m - j);
  const int64_t needed = n == 1 ? 1 : pow2i(j);

  // Tiling-aligned 2^-j cells whose closure lies in the theta == 1 ball.
  std::vector<Cube> cells;
  const double h = box.cell_side();
  const double rad = 1.0 / j;
  const int64_t tiles = pow2i(j);
  for (int64_t ty = 0; ty < (n == 2 ? tiles : 1) && static_cast<int64_t>(cells.size()) < needed; ++ty)
    for (int64_t tx = 0; tx < tiles && static_cast<int64_t>(cells.size()) < needed; ++tx) {
      const double x0 = tx * side * h, x1 = (tx + 1) * side * h;
      const double y0 = n == 2 ? ty * side * h : 0.0, y1 = n == 2 ? (ty + 1) * side * h : 0.0;
      const double fx = std::max(std::abs(x0 - cx), std::abs(x1 - cx));
      const double fy = n == 2 ? std::max(std::abs(y0 - cy), std::abs(y1 - cy)) : 0.0;
      if (std::hypot(fx, fy) <= rad) {
        Cube q;
        q.dim = n;
        q.scale_exp = j;
        q.resolution_exp = m;
        q.anchor = {tx * side, n == 2 ? ty * side : 0};
        cells.push_back(q);
      }
    }
  if (static_cast<int64_t>(cells.size()) < needed)
    throw std::invalid_argument("make_plateau_gadget: unresolvable geometry (not enough cells in the bump ball)");

  // k_i = lower corner of the centered quarter cell.
  std::vector<std::array<double, 2>> corners;
  for (const Cube& q : cells) {
    const double qcx = (q.anchor[0] + side / 2.0) * h;
    const double qcy = n == 2 ? (q.anchor[1] + side / 2.0) * h : 0.0;
    const double off = std::ldexp(1.0, -j - 3);
    corners.push_back({qcx - off, qcy - off});
  }

  const double scale = std::ldexp(1.0, -j - 1); // bump support side 2^{-j-1}
  std::vector<Complex> vals(static_cast<size_t>(box.cell_count()));
  const int64_t nx = box.extent[0];
  const int64_t ny = n == 2 ? box.extent[1] : 1;
  for (int64_t ly = 0; ly < ny; ++ly) {
    const double y = n == 2 ? (static_cast<double>(box.origin[1] + ly) + 0.5) * h : 0.0;
    for (int64_t lx = 0; lx < nx; ++lx) {
      const double x = (static_cast<double>(box.origin[0] + lx) + 0.5) * h;
      double bump = 0.0;
      for (const auto& c : corners) {
        const double px = (x - c[0]) / scale;
        const double py = n == 2 ? (y - c[1]) / scale : 0.375; // neutral plateau coordinate in 1-d
        bump += profile::plateau(px) * (n == 2 ? profile::plateau(py) : 1.0);
      }
      const double th = profile::theta_j(std::hypot(x - cx, n == 2 ? y - cy : 0.0), j, 1.0);
      const Complex v = (b - a) * bump + a * th;
      vals[static_cast<size_t>(ly * nx + lx)] = v;
    }
  }

  PlateauGadget out{ScalarField(box, std::move(vals)), std::move(cells), a, b, j};
  return out;
}

struct ValueDifferenceBound {
  double lower = 0.0; // |g(b) - g(a)|
  double upper = 0.0; // 4^{n+1} * sup_{k >= j} [g∘f]_{2^-k}
  bool holds = false;
};

/// The extraction chain: |g(b)-g(a)| against the composed gadget field's
/// scale functional, with the plateau cells folded in as a known family.
inline ValueDifferenceBound value_difference_bound(const GMap& g, const PlateauGadget& gadget,
                                                   const SolverPolicy& policy = {}, double slack = 1e-6) {
  const ScalarField gf = apply(g, gadget.field);
  PrefixTable pre(gf);
  const int n = gf.dim();
  const int m = gf.resolution_exp();
  double sup = 0.0;
  for (int k = gadget.j; k <= m; ++k) {
    const std::vector<std::vector<Cube>> known =
        k == gadget.j ? std::vector<std::vector<Cube>>{gadget.cells} : std::vector<std::vector<Cube>>{};
    sup = std::max(sup, eps_functional(gf, pre, k, policy, known).value);
  }
  ValueDifferenceBound out;
  out.lower = std::abs(g(gadget.b) - g(gadget.a));
  out.upper = std::pow(4.0, n + 1) * sup;
  out.holds = out.lower <= out.upper + slack;
  return out;
}

struct AffinityWitness {
  double diff_norm = 0.0; // ||g∘(beta eta + alpha phi) - g∘(beta eta)||_B over the window
  double lower = 0.0;     // 2^-n (1-2^-n) |g~(beta+alpha) - g~(beta) - g~(alpha)|
  bool holds = false;
};

/// The additivity-defect witness: a checkerboard background at level beta
/// plus a bump array at level alpha. g is normalized to g(0) = 0 before the
/// lower bound is formed; the field difference is offset-invariant.
inline AffinityWitness affinity_witness(const GMap& g, Complex alpha, Complex beta, int j, int64_t spacing, int n,
                                        int m, const SolverPolicy& policy = {}, double slack = 1e-6) {
  if (j < 3) throw std::invalid_argument("affinity_witness: requires j >= 3");
  if (m < j + 1) throw std::invalid_argument("affinity_witness: needs m >= j+1 to split the witness cells");
  if (spacing < 2) throw std::invalid_argument("affinity_witness: spacing must be >= 2 units");

  const int64_t count = n == 1 ? 1 : pow2i(j);
  const int64_t span = (count - 1) * spacing;
  const GridBox window = unit_window(n, m, {-2, n == 2 ? -2 : 0}, {span + 4, n == 2 ? span + 4 : 1});

  CatalogParams pe;
  const ScalarField eta = sample_catalog("checkerboard_eta", pe, n, m, window);
  CatalogParams pb;
  pb.num["j"] = j;
  pb.num["count"] = static_cast<double>(count);
  pb.num["spacing"] = static_cast<double>(spacing);
  const ScalarField phi = sample_catalog("phi_bump_array", pb, n, m, window);

  const ScalarField u = field_linear(beta, eta, alpha, phi);
  const ScalarField v = field_scale(beta, eta);
  const ScalarField diff = field_linear(Complex(1, 0), apply(g, u), Complex(-1, 0), apply(g, v));

  // Witness cells R_i around each bump center, split 2^-n / (1 - 2^-n) by eta.
  std::vector<Cube> witness_cells;
  const int64_t half = pow2i(m - j - 1);
  for (int64_t i = 0; i < count; ++i) {
    Cube q;
    q.dim = n;
    q.scale_exp = j;
    q.resolution_exp = m;
    const int64_t center = i * spacing * pow2i(m);
    q.anchor = {center - half, n == 2 ? center - half : 0};
    witness_cells.push_back(q);
  }

  PrefixTable pre(diff);
  double l1 = detail::unit_cube_abs_sup(diff, pre);
  double sup = 0.0;
  for (int k = 1; k <= m; ++k) {
    const std::vector<std::vector<Cube>> known =
        k == j ? std::vector<std::vector<Cube>>{witness_cells} : std::vector<std::vector<Cube>>{};
    sup = std::max(sup, eps_functional(diff, pre, k, policy, known).value);
  }

  const Complex g0 = g(Complex(0, 0));
  const Complex defect = (g(beta + alpha) - g0) - (g(beta) - g0) - (g(alpha) - g0);
  const double frac = std::ldexp(1.0, -n);

  AffinityWitness out;
  out.diff_norm = l1 + sup;
  out.lower = frac * (1.0 - frac) * std::abs(defect);
  out.holds = out.diff_norm >= out.lower - slack;
  return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class TriState { yes, no, undetermined };

inline const char* tristate_name(TriState t) {
  switch (t) {
    case TriState::yes: return "yes";
    case TriState::no: return "no";
    case TriState::undetermined: return "undetermined";
  }
  return "?";
}

struct GVerdict {
  GrowthEstimate growth;
  TriState uniform_continuity = TriState::undetermined;
  std::optional<std::pair<Complex, Complex>> uc_witness;
  Complex g0;
  double affine_defect = 0.0;
  bool table_caveat = false;
  // Predicted mapping properties of T_g.
  bool maps_b_to_b = false;
  bool maps_b0_to_b0 = false;
  bool maps_bc_rn_to_bc_rn = false;
  bool maps_bc_q0_to_bc_q0 = false;
  bool continuous_on_b = false;
};

namespace detail {

/// Nested-grid witness search for a uniform-continuity failure. At
/// refinement t the anchors reach radius 2^t and the pair distance is 2^-t;
/// a genuine failure keeps the image gap from decaying as t grows, while a
/// mere Hoelder-type modulus decays and is not reported.
inline std::optional<std::pair<Complex, Complex>> uc_witness_search(const GMap& g, int max_refine = 14,
                                                                    double threshold = 1e-3) {
  static const Complex dirs[8] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                  {0.7071067811865476, 0.7071067811865476},
                                  {-0.7071067811865476, 0.7071067811865476},
                                  {0.7071067811865476, -0.7071067811865476},
                                  {-0.7071067811865476, -0.7071067811865476}};
  std::vector<double> gap_at(static_cast<size_t>(max_refine + 1), 0.0);
  std::vector<std::pair<Complex, Complex>> arg_at(static_cast<size_t>(max_refine + 1));
  for (int t = 6; t <= max_refine; ++t) {
    const double step_t = std::ldexp(1.0, -t);
    const std::vector<Complex> anchors = sample_points(4.0, 17, t);
    for (const Complex& z : anchors)
      for (const Complex& d : dirs) {
        const Complex y = z + d * step_t;
        const double gap = std::abs(g(z) - g(y));
        if (gap > gap_at[static_cast<size_t>(t)]) {
          gap_at[static_cast<size_t>(t)] = gap;
          arg_at[static_cast<size_t>(t)] = {z, y};
        }
      }
  }
  const double fine = gap_at[static_cast<size_t>(max_refine)];
  const double coarse = gap_at[static_cast<size_t>(max_refine - 6)];
  if (fine >= threshold && fine >= 0.7 * coarse) return arg_at[static_cast<size_t>(max_refine)];
  return std::nullopt;
}

} // namespace detail

/// Assembles the verdict: growth estimate, uniform-continuity evidence,
/// additivity defect, and the predicted mapping properties.
inline GVerdict classify(const GMap& g) {
  GVerdict v;
  v.g0 = g(Complex(0, 0));
  v.growth = growth_index(g);
  v.table_caveat = g.kind == GKind::custom_table;

  // Uniform continuity: declared metadata (verified) upgrades to yes; a
  // sampled witness forces no; otherwise undetermined (no finite sampler
  // can certify a yes).
  v.uc_witness = detail::uc_witness_search(g);
  if (v.uc_witness) {
    v.uniform_continuity = TriState::no;
  } else if (g.uniformly_continuous_declared) {
    verify_metadata(g);
    v.uniform_continuity = TriState::yes;
  } else {
    v.uniform_continuity = TriState::undetermined;
  }

  // Additivity defect of g - g(0) over a coarse pair grid.
  const auto pts = detail::sample_points(2.0, 9, 3);
  for (const Complex& a : pts)
    for (const Complex& b : pts) {
      const double d = std::abs((g(a + b) - v.g0) - (g(a) - v.g0) - (g(b) - v.g0));
      v.affine_defect = std::max(v.affine_defect, d);
    }

  const bool uc = v.uniform_continuity == TriState::yes;
  v.maps_b_to_b = !v.growth.divergent;
  v.maps_b0_to_b0 = uc;
  v.maps_bc_rn_to_bc_rn = uc && v.g0 == Complex(0, 0);
  v.maps_bc_q0_to_bc_q0 = uc;
  v.continuous_on_b = v.affine_defect <= 1e-9 && uc;
  return v;
}

} // namespace bmolab
