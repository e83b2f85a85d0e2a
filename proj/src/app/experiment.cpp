#include "qzeno/app/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <tuple>

#include "qzeno/dephasing.hpp"
#include "qzeno/errors.hpp"
#include "qzeno/spectral.hpp"
#include "qzeno/udw.hpp"
#include "qzeno/wightman.hpp"

namespace qzeno::app {

namespace {

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

double csv_round(double x) { return std::strtod(format_value(x).c_str(), nullptr); }

Worldline make_worldline(const RunConfig& c) {
  const auto& w = c.worldline;
  const double horizon = 1.05 * c.tau_max + 0.5;
  switch (w.family) {
    case WorldlineFamily::stationary: return Worldline::stationary();
    case WorldlineFamily::uniform_acceleration: return Worldline::uniform_acceleration(w.a);
    case WorldlineFamily::oscillating: return Worldline::oscillating(w.b, w.v, horizon);
    case WorldlineFamily::circular: return Worldline::circular(w.b, w.v, horizon);
    case WorldlineFamily::sampled: {
      std::ifstream in(w.path);
      if (!in) throw ConfigError("worldline.path", "worldline.path: cannot open \"" + w.path + "\"");
      try {
        return load_sampled_worldline(in);
      } catch (const ValidationError& e) {
        throw ConfigError("worldline.path", "worldline.path: " + w.path + ": " + e.what());
      }
    }
  }
  throw ConfigError("worldline.family", "worldline.family: unsupported");
}

GridSpec make_grid_spec(const RunConfig& c, const Worldline& w) {
  const RegularizationParams reg(c.epsilon);
  GridSpec spec = default_grid_spec(w, reg, uniform_grid(c.tau_min, c.tau_max, c.n_points));
  const auto& q = c.quadrature;
  spec.gauss_order = q.gauss_order;
  if (q.base_panels_per_unit) spec.base_panels_per_unit = *q.base_panels_per_unit;
  if (q.diagonal_refine_width) spec.diagonal_refine_width = *q.diagonal_refine_width;
  if (q.diagonal_panel_width) spec.diagonal_panel_width = *q.diagonal_panel_width;
  for (int k = 0; k < q.refinement; ++k) spec = spec.refined();
  spec.validate();
  return spec;
}

RunResult run_experiment(const RunConfig& c) {
  RunResult r;
  r.config = c;
  const Worldline w = make_worldline(c);
  if (w.tau_max() < c.tau_max)
    throw ConfigError("grid.tau_max", "grid.tau_max: " + format_value(c.tau_max) +
                                          " exceeds the worldline's proper-time range " + format_value(w.tau_max()));
  r.worldline_description = w.describe();
  r.max_proper_acceleration = w.max_proper_acceleration();
  r.grid = make_grid_spec(c, w);

  const RegularizationParams reg(c.epsilon);
  const QubitParams qubit{c.omega0, c.delta, c.coupling};
  std::vector<double> survival;
  std::vector<bool> valid;
  std::optional<Complex> baseline;
  std::unique_ptr<HermitianKernel> kernel;
  if (c.channel == Channel::sigma_z_exact) {
    const DephasingResult d = solve_dephasing(w, qubit, reg, r.grid);
    survival = d.survival;
    valid.assign(survival.size(), true);
    r.kernel_evals = d.kernel_evals;
    baseline = Complex(d.chi.back() / (-2 * c.coupling * c.coupling), 0.0);
    kernel = std::make_unique<WightmanKernel>(w, reg);
  } else {
    const ChannelSpec ch = c.channel == Channel::sigma_x ? ChannelSpec::sigma_x() : ChannelSpec::sigma_z();
    const PerturbativeResult p = survival_perturbative(w, qubit, ch, reg, r.grid, c.validity_threshold);
    survival = p.survival;
    valid = p.valid;
    r.kernel_evals = p.kernel_evals;
    baseline = Complex(1.0 - p.survival.back(), 0.0);
    kernel = std::make_unique<PerturbativeKernel>(w, qubit, ch, reg);
  }
  if (c.quadrature.convergence_check)
    r.convergence = convergence_check(*kernel, r.grid, c.quadrature.convergence_tolerance, baseline);

  const DecayCurve exact_curve = decay_rate(r.grid.t_grid, survival);
  for (std::size_t i = 0; i < survival.size(); ++i) {
    r.tau.push_back(csv_round(r.grid.t_grid[i]));
    r.survival.push_back(csv_round(survival[i]));
    r.gamma.push_back(csv_round(exact_curve.gamma[i]));
  }
  r.valid = valid;
  DecayCurve curve{r.tau, r.gamma, to_string(c.channel), r.worldline_description};
  r.regimes = segment_regimes(curve, c.slope_tol);
  r.optimum = optimal_interval(curve);
  return r;
}

std::string format_csv(const RunResult& r) {
  std::string out = "tau,s,gamma,regime,valid\n";
  for (std::size_t i = 0; i < r.tau.size(); ++i) {
    out += format_value(r.tau[i]) + ',' + format_value(r.survival[i]) + ',' + format_value(r.gamma[i]) + ',';
    out += to_string(r.regimes.point_labels[i]);
    out += r.valid[i] ? ",true\n" : ",false\n";
  }
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  int line_no = 0;
  auto next_line = [&]() {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };
  if (next_line() != "tau,s,gamma,regime,valid") throw ValidationError("csv line 1: expected header tau,s,gamma,regime,valid");
  while (pos < text.size()) {
    const std::string_view line = next_line();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t comma; (comma = line.find(',', start)) != std::string_view::npos; start = comma + 1)
      fields.emplace_back(line.substr(start, comma - start));
    fields.emplace_back(line.substr(start));
    const std::string where = "csv line " + std::to_string(line_no) + ": ";
    if (fields.size() != 5) throw ValidationError(where + "expected 5 fields");
    CsvRow row{};
    double* targets[] = {&row.tau, &row.s, &row.gamma};
    for (int k = 0; k < 3; ++k) {
      char* end = nullptr;
      *targets[k] = std::strtod(fields[k].c_str(), &end);
      if (fields[k].empty() || *end != '\0') throw ValidationError(where + "bad number \"" + fields[k] + "\"");
    }
    row.regime = regime_from_string(fields[3]);
    if (fields[4] != "true" && fields[4] != "false") throw ValidationError(where + "valid must be true or false");
    row.valid = fields[4] == "true";
    rows.push_back(row);
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& text, const std::string& field) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(field, field + ": cannot open \"" + path + "\" for writing");
  out << text;
  if (!out) throw ConfigError(field, field + ": write to \"" + path + "\" failed");
}

void write_outputs(const RunResult& r) {
  write_text_file(r.config.csv, format_csv(r), "output.csv");
  write_text_file(r.config.json, format_json(r, utc_timestamp()), "output.json");
  if (!r.config.svg.empty()) {
    const std::string title = r.worldline_description + ", " + to_string(r.config.channel);
    write_text_file(r.config.svg, render_svg(title, {{to_string(r.config.channel), &r}}), "output.svg");
  }
}

namespace {

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

}  // namespace

std::vector<RunResult> run_sweep(const RawConfig& raw) {
  const RunConfig base = resolve(raw);
  if (!base.sweep) throw ConfigError("sweep.parameter", raw.source + ": sweep.parameter: required field missing");
  const std::string& key = base.sweep->parameter;
  const std::string leaf = key.substr(key.find('.') + 1);

  std::vector<RunResult> runs;
  for (double v : base.sweep->values) {
    RawConfig point = raw;
    apply_override(point, key, format_value(v));
    point.origin[key] = "sweep.values";
    RunConfig c = resolve(point);
    const std::string suffix = "." + leaf + format_value(v);
    c.csv = with_suffix(base.csv, suffix);
    c.json = with_suffix(base.json, suffix);
    c.svg.clear();
    runs.push_back(run_experiment(c));
    write_outputs(runs.back());
  }
  if (!base.svg.empty()) {
    std::vector<SvgSeries> series;
    for (std::size_t i = 0; i < runs.size(); ++i)
      series.push_back({leaf + " = " + format_value(base.sweep->values[i]), &runs[i]});
    write_text_file(base.svg, render_svg("sweep over " + key + ", " + to_string(base.channel), series), "output.svg");
  }
  return runs;
}

namespace {

RunConfig figure_base(Channel channel, bool convergence_check) {
  RunConfig c;
  c.channel = channel;
  c.omega0 = 2.0;
  c.delta = 0.0;
  c.ohmic_G = 0.01;
  c.ohmic_omega_c = 10.0;
  const MappedParams m = map_params({0.01, 10.0});
  c.coupling = m.coupling;
  c.epsilon = m.regularization.epsilon;
  c.tau_min = 0.02;
  c.tau_max = 3.0;
  c.n_points = 597;  // spacing 0.005 resolves the narrow regime changes near half periods
  c.quadrature.convergence_check = convergence_check;
  return c;
}

WorldlineConfig orbit(WorldlineFamily family, double omega) {
  WorldlineConfig w;
  if (omega == 0.0) return w;
  w.family = family;
  w.v = 0.99;
  w.omega = omega;
  w.b = w.v / omega;
  return w;
}

struct Curve {
  std::string tag;
  std::string label;
  WorldlineConfig worldline;
  Channel channel;
  bool dashed = false;
};

struct Panel {
  std::string tag;
  std::string title;
  std::vector<Curve> curves;
};

std::vector<Panel> figure_panels(const std::string& id) {
  const auto both_channels = [](const std::string& what, const std::vector<Curve>& proto) {
    std::vector<Panel> panels;
    for (auto [tag, channel, name] : {std::tuple{"a", Channel::sigma_x, "sigma_x coupling"},
                                      std::tuple{"b", Channel::sigma_z_exact, "sigma_z coupling, exact"}}) {
      Panel p{tag, what + ": " + name, proto};
      for (auto& c : p.curves) c.channel = channel;
      panels.push_back(p);
    }
    return panels;
  };
  if (id == "shm") {
    std::vector<Curve> curves;
    for (auto [tag, label, omega] : {std::tuple{"omega0", "ω = 0 (inertial)", 0.0},
                                     std::tuple{"omega1.98", "ω = 1.98 eV", 1.98},
                                     std::tuple{"omega9.9", "ω = 9.9 eV", 9.9}})
      curves.push_back({tag, label, orbit(WorldlineFamily::oscillating, omega), Channel::sigma_x});
    return both_channels("Oscillating worldline, v = 0.99", curves);
  }
  if (id == "ua") {
    std::vector<Curve> curves;
    for (auto [tag, label, a] :
         {std::tuple{"a1", "a = 1 eV", 1.0}, std::tuple{"a10", "a = 10 eV", 10.0}, std::tuple{"a100", "a = 100 eV", 100.0}}) {
      WorldlineConfig w;
      w.family = WorldlineFamily::uniform_acceleration;
      w.a = a;
      curves.push_back({tag, label, w, Channel::sigma_x});
    }
    return both_channels("Uniformly accelerating worldline", curves);
  }
  if (id == "bm") {
    return {Panel{"", "Benchmarking, G = 0.01, ω_c = 10 (sigma_z coupling)",
                  {Curve{"perturbative", "perturbative", {}, Channel::sigma_z_perturbative, false},
                   Curve{"exact", "exact", {}, Channel::sigma_z_exact, true}}}};
  }
  if (id == "cm") {
    std::vector<Curve> curves;
    for (auto [tag, label, omega] : {std::tuple{"omega1.98", "ω = 1.98 eV", 1.98}, std::tuple{"omega9.9", "ω = 9.9 eV", 9.9}})
      curves.push_back({tag, label, orbit(WorldlineFamily::circular, omega), Channel::sigma_x});
    return both_channels("Circular motion, v = 0.99", curves);
  }
  throw ConfigError("figure", "figure: unknown id \"" + id + "\" (shm, ua, bm, cm)");
}

}  // namespace

std::vector<std::string> reproduce_figure(const std::string& id, const std::string& out_dir, bool convergence_check) {
  const std::vector<Panel> panels = figure_panels(id);
  const std::filesystem::path dir(out_dir);
  std::vector<std::string> written;
  for (const auto& panel : panels) {
    const std::string stem = panel.tag.empty() ? id : id + "_" + panel.tag;
    std::vector<RunResult> runs;
    runs.reserve(panel.curves.size());
    for (const auto& curve : panel.curves) {
      RunConfig c = figure_base(curve.channel, convergence_check);
      c.worldline = curve.worldline;
      c.csv = (dir / (stem + "_" + curve.tag + ".csv")).string();
      c.json = (dir / (stem + "_" + curve.tag + ".json")).string();
      runs.push_back(run_experiment(c));
      write_outputs(runs.back());
      written.push_back(c.csv);
      written.push_back(c.json);
    }
    std::vector<SvgSeries> series;
    for (std::size_t i = 0; i < runs.size(); ++i) series.push_back({panel.curves[i].label, &runs[i], panel.curves[i].dashed});
    const std::string svg = (dir / (stem + ".svg")).string();
    write_text_file(svg, render_svg(panel.title, series), "output.svg");
    written.push_back(svg);
  }
  return written;
}

}  // namespace qzeno::app
