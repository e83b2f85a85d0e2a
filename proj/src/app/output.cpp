#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iterator>
#include <json.hpp>
#include <tuple>

#include "qzeno/app/experiment.hpp"

namespace qzeno::app {

namespace {

using Json = nlohmann::ordered_json;

Json config_json(const RunConfig& c) {
  Json w = {{"family", to_string(c.worldline.family)}};
  switch (c.worldline.family) {
    case WorldlineFamily::uniform_acceleration: w["a"] = c.worldline.a; break;
    case WorldlineFamily::oscillating:
    case WorldlineFamily::circular:
      w["b"] = c.worldline.b;
      w["v"] = c.worldline.v;
      w["omega"] = c.worldline.omega;
      break;
    case WorldlineFamily::sampled: w["path"] = c.worldline.path; break;
    case WorldlineFamily::stationary: break;
  }
  Json qubit = {{"omega0", c.omega0}, {"delta", c.delta}, {"c", c.coupling}, {"epsilon", c.epsilon}};
  Json out = {{"worldline", w}, {"channel", {{"type", to_string(c.channel)}}}, {"qubit", qubit}};
  if (c.ohmic_G) out["ohmic"] = {{"G", *c.ohmic_G}, {"omega_c", *c.ohmic_omega_c}};
  out["grid"] = {{"tau_min", c.tau_min}, {"tau_max", c.tau_max}, {"n_points", c.n_points}};
  const auto& q = c.quadrature;
  Json quad = {{"gauss_order", q.gauss_order}, {"refinement", q.refinement},
               {"convergence_check", q.convergence_check}, {"convergence_tolerance", q.convergence_tolerance}};
  if (q.base_panels_per_unit) quad["base_panels_per_unit"] = *q.base_panels_per_unit;
  if (q.diagonal_refine_width) quad["diagonal_refine_width"] = *q.diagonal_refine_width;
  if (q.diagonal_panel_width) quad["diagonal_panel_width"] = *q.diagonal_panel_width;
  out["quadrature"] = quad;
  out["analysis"] = {{"slope_tol", c.slope_tol}, {"validity_threshold", c.validity_threshold}};
  out["output"] = {{"csv", c.csv}, {"json", c.json}, {"svg", c.svg}};
  if (c.sweep) out["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  return out;
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-14 ? 0.0 : v);
  return buf;
}

double nice_step(double range) {
  const double raw = range / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr const char* kZenoFill = "#d6e6f5";
constexpr const char* kAntiZenoFill = "#fbe3cc";

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_json(const RunResult& r, const std::string& timestamp) {
  Json j;
  j["tool"] = "qzeno";
  j["version"] = std::string(kVersion);
  j["timestamp"] = timestamp;
  j["config"] = config_json(r.config);
  j["worldline"] = {{"description", r.worldline_description},
                    {"max_proper_acceleration", r.max_proper_acceleration}};
  j["quadrature"] = {{"gauss_order", r.grid.gauss_order},
                     {"base_panels_per_unit", r.grid.base_panels_per_unit},
                     {"diagonal_refine_width", r.grid.diagonal_refine_width},
                     {"diagonal_panel_width", r.grid.diagonal_panel_width}};
  j["kernel_evals"] = r.kernel_evals;
  if (r.convergence) {
    const auto& c = *r.convergence;
    j["convergence"] = {{"t_max", c.t_max},
                        {"value", complex_json(c.value)},
                        {"refined_value", complex_json(c.refined_value)},
                        {"relative_difference", c.relative_difference},
                        {"tolerance", c.tolerance},
                        {"passed", c.passed},
                        {"kernel_evals", c.kernel_evals},
                        {"advice", c.advice}};
  } else {
    j["convergence"] = nullptr;
  }
  Json segments = Json::array();
  for (const auto& s : r.regimes.segments)
    segments.push_back({{"tau_start", s.tau_start}, {"tau_end", s.tau_end}, {"regime", std::string(to_string(s.label))}});
  j["segments"] = segments;
  j["optimal_interval"] = {{"tau", r.optimum.tau}, {"gamma", r.optimum.gamma}};
  return j.dump(2) + "\n";
}

std::string render_svg(const std::string& title, const std::vector<SvgSeries>& series) {
  const bool strips = series.size() > 1;
  const double width = 780, left = 80, right = 190, top = 48;
  const double plot_w = width - left - right, plot_h = 330;
  const double strip_top = top + plot_h + 46, strip_h = 10, strip_gap = 6;
  const double height = strip_top + (strips ? series.size() * (strip_h + strip_gap) + 16 : 0) + 10;

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = 0.0, y_hi = -INFINITY;
  for (const auto& s : series) {
    x_lo = std::min(x_lo, s.run->tau.front());
    x_hi = std::max(x_hi, s.run->tau.back());
    for (double g : s.run->gamma) {
      y_lo = std::min(y_lo, g);
      y_hi = std::max(y_hi, g);
    }
  }
  if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
  y_hi += 0.05 * (y_hi - y_lo);
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) { return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };
  const auto fill = [](Regime r) { return r == Regime::zeno ? kZenoFill : kAntiZenoFill; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
                    "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(title) + "</text>\n";

  if (!strips) {
    for (const auto& seg : series.front().run->regimes.segments)
      svg += "<rect x=\"" + num(px(seg.tau_start)) + "\" y=\"" + num(top) + "\" width=\"" +
             num(px(seg.tau_end) - px(seg.tau_start)) + "\" height=\"" + num(plot_h) + "\" fill=\"" + fill(seg.label) +
             "\"/>\n";
  }

  const double xs = nice_step(x_hi - x_lo), ys = nice_step(y_hi - y_lo);
  for (double x = std::ceil(x_lo / xs) * xs; x <= x_hi + 1e-12 * xs; x += xs) {
    svg += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(px(x)) + "\" y2=\"" +
           num(top + plot_h) + "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(top + plot_h + 16) + "\" text-anchor=\"middle\">" +
           tick_label(x) + "</text>\n";
  }
  for (double y = std::ceil(y_lo / ys) * ys; y <= y_hi + 1e-12 * ys; y += ys) {
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" +
           num(py(y)) + "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + tick_label(y) +
           "</text>\n";
  }
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) + "\" height=\"" +
         num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(top + plot_h + 36) +
         "\" text-anchor=\"middle\">proper time τ (eV⁻¹)</text>\n";
  svg += "<text transform=\"translate(" + num(22) + "," + num(top + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">decay rate Γ(τ) (eV)</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.8\"";
    if (s.dashed) svg += " stroke-dasharray=\"7 4\"";
    svg += " points=\"";
    for (std::size_t i = 0; i < s.run->tau.size(); ++i)
      svg += (i ? " " : "") + num(px(s.run->tau[i])) + "," + num(py(s.run->gamma[i]));
    svg += "\"/>\n";

    const double ly = top + 14 + 20.0 * k, lx = left + plot_w + 14;
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 26) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"1.8\"" + (s.dashed ? " stroke-dasharray=\"7 4\"" : "") + "/>\n";
    svg += "<text x=\"" + num(lx + 32) + "\" y=\"" + num(ly + 4) + "\">" + xml_escape(s.label) + "</text>\n";

    if (strips) {
      const double sy = strip_top + k * (strip_h + strip_gap);
      for (const auto& seg : s.run->regimes.segments)
        svg += "<rect x=\"" + num(px(seg.tau_start)) + "\" y=\"" + num(sy) + "\" width=\"" +
               num(px(seg.tau_end) - px(seg.tau_start)) + "\" height=\"" + num(strip_h) + "\" fill=\"" +
               fill(seg.label) + "\" stroke=\"" + color + "\" stroke-width=\"0.6\"/>\n";
      svg += "<line x1=\"" + num(left - 24) + "\" y1=\"" + num(sy + strip_h / 2) + "\" x2=\"" + num(left - 6) +
             "\" y2=\"" + num(sy + strip_h / 2) + "\" stroke=\"" + color + "\" stroke-width=\"3\"/>\n";
    }
  }

  const double ry = top + 14 + 20.0 * series.size() + 12, rx = left + plot_w + 14;
  for (auto [label, regime, offset] : {std::tuple{"Zeno", Regime::zeno, 0.0}, std::tuple{"anti-Zeno", Regime::anti_zeno, 20.0}}) {
    svg += "<rect x=\"" + num(rx) + "\" y=\"" + num(ry + offset - 8) + "\" width=\"26\" height=\"12\" fill=\"" +
           fill(regime) + "\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"" + num(rx + 32) + "\" y=\"" + num(ry + offset + 2) + "\">" + label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace qzeno::app
