#pragma once

// Report emission: CSV as the canonical numeric output (config echoed into
// the header), JSON for full structures, and a small SVG line renderer for
// sweep plots. Doubles are printed shortest-round-trip so a replayed run
// reproduces files byte-for-byte.

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmolab/config.hpp"
#include "bmolab/norms.hpp"
#include "bmolab/perimeter.hpp"
#include "bmolab/superposition.hpp"

namespace bmolab {

inline std::string fmt_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string fmt_complex(Complex z) { return fmt_double(z.real()) + (z.imag() < 0 ? "" : "+") + fmt_double(z.imag()) + "i"; }

// ---------------------------------------------------------------------------
// CSV

class CsvWriter {
public:
  CsvWriter(std::string title, const RunConfig& cfg) {
    out_ += "# " + std::move(title) + "\n";
    for (const auto& [s, kv] : cfg.entries) out_ += "# config " + s + "." + kv.first + " = " + kv.second + "\n";
  }

  void columns(const std::vector<std::string>& names) { append_row(names); }
  void row(const std::vector<std::string>& cells) { append_row(cells); }
  void comment(const std::string& text) { out_ += "# " + text + "\n"; }

  const std::string& text() const { return out_; }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << out_;
  }

private:
  void append_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }
  std::string out_;
};

// ---------------------------------------------------------------------------
// JSON pieces

inline nlohmann::json to_json(const Cube& q) {
  nlohmann::json j;
  j["scale_exp"] = q.scale_exp;
  j["resolution_exp"] = q.resolution_exp;
  j["anchor"] = q.dim == 2 ? nlohmann::json{q.anchor[0], q.anchor[1]} : nlohmann::json{q.anchor[0]};
  return j;
}

inline nlohmann::json to_json(const EpsReport& r) {
  nlohmann::json j;
  j["k"] = r.k;
  j["epsilon"] = std::ldexp(1.0, -r.k);
  j["value"] = r.value;
  j["method"] = method_name(r.method);
  j["optimal"] = r.optimal;
  j["budget"] = r.family.budget;
  nlohmann::json cubes = nlohmann::json::array();
  for (const Cube& q : r.family.cubes) cubes.push_back(to_json(q));
  j["family"] = std::move(cubes);
  return j;
}

inline nlohmann::json to_json(const NormReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode == NormMode::q0 ? "q0" : "rn_window";
  j["l1_term"] = r.l1_term;
  j["sup_eps"] = r.sup_eps;
  j["total"] = r.total;
  nlohmann::json per = nlohmann::json::array();
  for (const EpsReport& er : r.per_k) per.push_back(to_json(er));
  j["per_k"] = std::move(per);
  return j;
}

inline nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json j;
  j["caveat"] = r.caveat;
  if (r.target) j["target"] = *r.target;
  if (r.rel_error) j["rel_error"] = *r.rel_error;
  nlohmann::json per = nlohmann::json::array();
  for (const EpsReport& er : r.per_k) per.push_back(to_json(er));
  j["per_k"] = std::move(per);
  return j;
}

inline nlohmann::json to_json(const GVerdict& v) {
  nlohmann::json j;
  j["growth_index"] = v.growth.value;
  j["growth_divergent"] = v.growth.divergent;
  j["uniform_continuity"] = tristate_name(v.uniform_continuity);
  if (v.uc_witness) {
    j["uc_witness"] = {{"x", {v.uc_witness->first.real(), v.uc_witness->first.imag()}},
                       {"y", {v.uc_witness->second.real(), v.uc_witness->second.imag()}}};
  }
  j["g0"] = {v.g0.real(), v.g0.imag()};
  j["affine_defect"] = v.affine_defect;
  j["table_caveat"] = v.table_caveat;
  j["predicts"] = {{"b_to_b", v.maps_b_to_b},
                   {"b0_to_b0", v.maps_b0_to_b0},
                   {"bc_rn_to_bc_rn", v.maps_bc_rn_to_bc_rn},
                   {"bc_q0_to_bc_q0", v.maps_bc_q0_to_bc_q0},
                   {"continuous_on_b", v.continuous_on_b}};
  return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// SVG line plot

/// Minimal polyline chart: one or two series over a shared x axis.
inline std::string render_svg_lines(const std::vector<double>& xs, const std::vector<std::vector<double>>& series,
                                    const std::vector<std::string>& labels, const std::string& title) {
  const int W = 640, H = 400, ML = 60, MR = 20, MT = 40, MB = 40;
  double xmin = xs.front(), xmax = xs.back();
  double ymin = 0.0, ymax = 1e-12;
  for (const auto& s : series)
    for (double v : s) ymax = std::max(ymax, v);
  ymax *= 1.1;
  if (xmax == xmin) xmax = xmin + 1.0;

  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) + "\" height=\"" +
                    std::to_string(H) + "\" viewBox=\"0 0 " + std::to_string(W) + " " + std::to_string(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title +
         "</text>\n";
  svg += "<line x1=\"" + std::to_string(ML) + "\" y1=\"" + std::to_string(H - MB) + "\" x2=\"" + std::to_string(W - MR) +
         "\" y2=\"" + std::to_string(H - MB) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + std::to_string(ML) + "\" y1=\"" + std::to_string(MT) + "\" x2=\"" + std::to_string(ML) +
         "\" y2=\"" + std::to_string(H - MB) + "\" stroke=\"black\"/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (size_t s = 0; s < series.size(); ++s) {
    std::string pts;
    for (size_t i = 0; i < xs.size(); ++i)
      pts += fmt_double(px(xs[i])) + "," + fmt_double(py(series[s][i])) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colors[s % 4]) + "\" stroke-width=\"2\" points=\"" + pts +
           "\"/>\n";
    if (s < labels.size())
      svg += "<text x=\"" + std::to_string(W - MR - 150) + "\" y=\"" + std::to_string(MT + 18 * (s + 1)) +
             "\" font-size=\"12\" fill=\"" + colors[s % 4] + "\">" + labels[s] + "</text>\n";
  }
  for (size_t i = 0; i < xs.size(); ++i)
    svg += "<text x=\"" + fmt_double(px(xs[i])) + "\" y=\"" + std::to_string(H - MB + 16) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + fmt_double(xs[i]) + "</text>\n";
  svg += "<text x=\"12\" y=\"" + std::to_string(MT) + "\" font-size=\"11\">" + fmt_double(ymax / 1.1) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

} // namespace bmolab
