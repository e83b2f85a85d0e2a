#include "qzeno/app/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qzeno/spectral.hpp"

namespace qzeno::app {

namespace pt = boost::property_tree;

namespace {

const std::vector<std::string> kKeys = {
    "worldline.family", "worldline.a", "worldline.b", "worldline.v", "worldline.omega", "worldline.path",
    "channel.type",
    "qubit.omega0", "qubit.delta", "qubit.c", "qubit.epsilon",
    "ohmic.G", "ohmic.omega_c",
    "grid.tau_min", "grid.tau_max", "grid.n_points",
    "quadrature.gauss_order", "quadrature.base_panels_per_unit", "quadrature.diagonal_refine_width",
    "quadrature.diagonal_panel_width", "quadrature.refinement", "quadrature.convergence_check",
    "quadrature.convergence_tolerance",
    "analysis.slope_tol", "analysis.validity_threshold",
    "output.csv", "output.json", "output.svg",
    "sweep.parameter", "sweep.values"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool is_known(const std::string& key) { return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end(); }

// Reads typed values and reports problems against the key's origin.
class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const auto it = raw_.origin.find(key);
    const std::string where = it != raw_.origin.end() ? it->second : raw_.source;
    throw ConfigError(key, where + ": " + key + ": " + why);
  }

  bool has(const std::string& key) const { return raw_.tree.get_optional<std::string>(key).has_value(); }

  std::string text(const std::string& key) const { return raw_.tree.get<std::string>(key); }

  std::string required_text(const std::string& key) const {
    if (!has(key) || text(key).empty()) {
      throw ConfigError(key, raw_.source + ": " + key + ": required field missing");
    }
    return text(key);
  }

  std::optional<double> number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return parse_number(key, text(key));
  }

  double parse_number(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
      fail(key, "expected a finite number, got \"" + s + "\"");
    return v;
  }

  std::optional<int> integer(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const std::string s = text(key);
    int v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) fail(key, "expected an integer, got \"" + s + "\"");
    return v;
  }

  std::optional<bool> boolean(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const std::string s = text(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(key, "expected true or false, got \"" + s + "\"");
  }

  double positive(const std::string& key, double v) const {
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }

  void forbid(const std::string& key, const std::string& why) const {
    if (has(key)) fail(key, why);
  }

 private:
  const RawConfig& raw_;
};

WorldlineFamily parse_family(const Reader& r, const std::string& s) {
  for (auto f : {WorldlineFamily::stationary, WorldlineFamily::uniform_acceleration, WorldlineFamily::oscillating,
                 WorldlineFamily::circular, WorldlineFamily::sampled})
    if (to_string(f) == s) return f;
  r.fail("worldline.family",
         "unknown family \"" + s + "\" (stationary, uniform_acceleration, oscillating, circular, sampled)");
}

Channel parse_channel(const Reader& r, const std::string& s) {
  for (auto c : {Channel::sigma_x, Channel::sigma_z_exact, Channel::sigma_z_perturbative})
    if (to_string(c) == s) return c;
  r.fail("channel.type", "unknown channel \"" + s + "\" (sigma_x, sigma_z_exact, sigma_z_perturbative)");
}

WorldlineConfig resolve_worldline(const Reader& r) {
  WorldlineConfig w;
  w.family = parse_family(r, r.required_text("worldline.family"));
  const std::string fam = to_string(w.family);
  const auto unused = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) r.forbid(k, "not used by family " + fam);
  };
  switch (w.family) {
    case WorldlineFamily::stationary:
      unused({"worldline.a", "worldline.b", "worldline.v", "worldline.omega", "worldline.path"});
      break;
    case WorldlineFamily::uniform_acceleration:
      unused({"worldline.b", "worldline.v", "worldline.omega", "worldline.path"});
      if (!r.has("worldline.a")) r.required_text("worldline.a");
      w.a = r.positive("worldline.a", *r.number("worldline.a"));
      break;
    case WorldlineFamily::oscillating:
    case WorldlineFamily::circular: {
      unused({"worldline.a", "worldline.path"});
      if (!r.has("worldline.v")) r.required_text("worldline.v");
      w.v = *r.number("worldline.v");
      if (!(w.v > 0.0 && w.v < 1.0)) r.fail("worldline.v", "must lie in (0, 1)");
      const bool has_b = r.has("worldline.b"), has_omega = r.has("worldline.omega");
      if (has_b == has_omega) {
        if (has_b) r.fail("worldline.omega", "give exactly one of worldline.b and worldline.omega");
        r.required_text("worldline.b");
      }
      if (has_b) {
        w.b = r.positive("worldline.b", *r.number("worldline.b"));
        w.omega = w.v / w.b;
      } else {
        w.omega = r.positive("worldline.omega", *r.number("worldline.omega"));
        w.b = w.v / w.omega;
      }
      break;
    }
    case WorldlineFamily::sampled:
      unused({"worldline.a", "worldline.b", "worldline.v", "worldline.omega"});
      w.path = r.required_text("worldline.path");
      break;
  }
  return w;
}

}  // namespace

std::string to_string(Channel c) {
  switch (c) {
    case Channel::sigma_x: return "sigma_x";
    case Channel::sigma_z_exact: return "sigma_z_exact";
    case Channel::sigma_z_perturbative: return "sigma_z_perturbative";
  }
  return "?";
}

const std::vector<std::string>& known_keys() { return kKeys; }

RawConfig parse_config(std::istream& in, const std::string& source) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  RawConfig raw;
  raw.source = source;
  std::istringstream parse_stream(text);
  try {
    pt::read_ini(parse_stream, raw.tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  // Second pass for diagnostics only: the line of every key.
  std::istringstream lines(text);
  std::string line, section;
  for (int no = 1; std::getline(lines, line); ++no) {
    line = trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line[0] == '[') {
      section = trim(line.substr(1, line.find(']') - 1));
      continue;
    }
    const std::string where = source + ":" + std::to_string(no);
    const std::string key = trim(line.substr(0, line.find('=')));
    if (section.empty()) throw ConfigError(key, where + ": " + key + ": key outside any [section]");
    const std::string dotted = section + "." + key;
    if (!is_known(dotted)) throw ConfigError(dotted, where + ": " + dotted + ": unknown key");
    raw.origin[dotted] = where;
  }
  return raw;
}

RawConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", path + ": cannot open config file");
  return parse_config(in, path);
}

void apply_override(RawConfig& raw, const std::string& key, const std::string& value) {
  if (!is_known(key)) throw ConfigError(key, "command line: " + key + ": unknown key");
  raw.tree.put(key, value);
  raw.origin[key] = "command line";
}

RunConfig resolve(const RawConfig& raw) {
  const Reader r(raw);
  RunConfig c;
  c.worldline = resolve_worldline(r);
  c.channel = parse_channel(r, r.required_text("channel.type"));

  c.omega0 = r.number("qubit.omega0").value_or(2.0);
  c.delta = r.number("qubit.delta").value_or(0.0);
  if (c.channel == Channel::sigma_z_exact && c.delta != 0.0)
    r.fail("qubit.delta", "the exact sigma_z solution needs delta = 0");

  const bool qubit_pair = r.has("qubit.c") || r.has("qubit.epsilon");
  const bool ohmic_pair = r.has("ohmic.G") || r.has("ohmic.omega_c");
  if (qubit_pair && ohmic_pair)
    r.fail(r.has("ohmic.G") ? "ohmic.G" : "ohmic.omega_c",
           "give either qubit.c with qubit.epsilon or ohmic.G with ohmic.omega_c, not both");
  if (!qubit_pair && !ohmic_pair) r.required_text("ohmic.G");
  if (qubit_pair) {
    r.required_text("qubit.c");
    r.required_text("qubit.epsilon");
    c.coupling = r.positive("qubit.c", *r.number("qubit.c"));
    c.epsilon = r.positive("qubit.epsilon", *r.number("qubit.epsilon"));
  } else {
    r.required_text("ohmic.G");
    r.required_text("ohmic.omega_c");
    c.ohmic_G = r.positive("ohmic.G", *r.number("ohmic.G"));
    c.ohmic_omega_c = r.positive("ohmic.omega_c", *r.number("ohmic.omega_c"));
    const MappedParams m = map_params({*c.ohmic_G, *c.ohmic_omega_c});
    c.coupling = m.coupling;
    c.epsilon = m.regularization.epsilon;
  }

  c.tau_min = r.positive("grid.tau_min", r.number("grid.tau_min").value_or(0.02));
  c.tau_max = r.number("grid.tau_max").value_or(3.0);
  if (!(c.tau_max > c.tau_min)) r.fail("grid.tau_max", "must exceed grid.tau_min");
  c.n_points = r.integer("grid.n_points").value_or(150);
  if (c.n_points < 8) r.fail("grid.n_points", "at least 8 points are needed for regime segmentation");

  auto& q = c.quadrature;
  q.gauss_order = r.integer("quadrature.gauss_order").value_or(8);
  if (q.gauss_order != 4 && q.gauss_order != 8 && q.gauss_order != 16)
    r.fail("quadrature.gauss_order", "must be 4, 8 or 16");
  q.base_panels_per_unit = r.integer("quadrature.base_panels_per_unit");
  if (q.base_panels_per_unit && *q.base_panels_per_unit < 8)
    r.fail("quadrature.base_panels_per_unit", "must be at least 8");
  if (auto v = r.number("quadrature.diagonal_refine_width"))
    q.diagonal_refine_width = r.positive("quadrature.diagonal_refine_width", *v);
  if (auto v = r.number("quadrature.diagonal_panel_width"))
    q.diagonal_panel_width = r.positive("quadrature.diagonal_panel_width", *v);
  q.refinement = r.integer("quadrature.refinement").value_or(0);
  if (q.refinement < 0 || q.refinement > 4) r.fail("quadrature.refinement", "must lie in [0, 4]");
  q.convergence_check = r.boolean("quadrature.convergence_check").value_or(true);
  q.convergence_tolerance =
      r.positive("quadrature.convergence_tolerance", r.number("quadrature.convergence_tolerance").value_or(1e-6));

  c.slope_tol = r.number("analysis.slope_tol").value_or(1e-3);
  if (!(c.slope_tol >= 0.0)) r.fail("analysis.slope_tol", "must be nonnegative");
  c.validity_threshold = r.positive("analysis.validity_threshold", r.number("analysis.validity_threshold").value_or(0.1));

  c.csv = r.required_text("output.csv");
  if (r.has("output.json") && !r.text("output.json").empty()) {
    c.json = r.text("output.json");
  } else {
    const auto dot = c.csv.find_last_of('.');
    const auto slash = c.csv.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    c.json = (has_ext ? c.csv.substr(0, dot) : c.csv) + ".json";
  }
  if (r.has("output.svg")) c.svg = r.text("output.svg");

  if (r.has("sweep.parameter") || r.has("sweep.values")) {
    SweepConfig s;
    s.parameter = r.required_text("sweep.parameter");
    if (!is_known(s.parameter) || s.parameter.rfind("sweep.", 0) == 0 || s.parameter.rfind("output.", 0) == 0)
      r.fail("sweep.parameter", "\"" + s.parameter + "\" is not a sweepable key");
    std::string list = r.required_text("sweep.values");
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream items(list);
    for (std::string item; items >> item;) s.values.push_back(r.parse_number("sweep.values", item));
    if (s.values.empty()) r.fail("sweep.values", "needs at least one value");
    c.sweep = s;
  }
  return c;
}

}  // namespace qzeno::app
