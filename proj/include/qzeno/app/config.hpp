#pragma once

#include <boost/property_tree/ptree.hpp>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qzeno/errors.hpp"
#include "qzeno/worldline.hpp"

namespace qzeno::app {

/// Bad configuration. The message carries "source:line: field: reason" when
/// the line is known.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string field, const std::string& what)
      : ValidationError(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Channel { sigma_x, sigma_z_exact, sigma_z_perturbative };

std::string to_string(Channel c);

struct WorldlineConfig {
  WorldlineFamily family = WorldlineFamily::stationary;
  double a = 0.0;      // uniform_acceleration
  double b = 0.0;      // oscillating, circular: amplitude or radius
  double v = 0.0;      // oscillating, circular: peak or orbital speed
  double omega = 0.0;  // v / b
  std::string path;    // sampled
};

struct QuadratureConfig {
  int gauss_order = 8;
  std::optional<int> base_panels_per_unit;
  std::optional<double> diagonal_refine_width;
  std::optional<double> diagonal_panel_width;
  int refinement = 0;  // extra doublings of every panel count
  bool convergence_check = true;
  double convergence_tolerance = 1e-6;
};

struct SweepConfig {
  std::string parameter;  // dotted key
  std::vector<double> values;
};

/// Fully resolved run description. Exactly one coupling parameterization was
/// given; `coupling` and `epsilon` hold the values actually used.
struct RunConfig {
  WorldlineConfig worldline;
  Channel channel = Channel::sigma_x;
  double omega0 = 2.0;
  double delta = 0.0;
  double coupling = 0.0;
  double epsilon = 0.0;
  std::optional<double> ohmic_G;
  std::optional<double> ohmic_omega_c;
  double tau_min = 0.02;
  double tau_max = 3.0;
  int n_points = 150;
  QuadratureConfig quadrature;
  double slope_tol = 1e-3;
  double validity_threshold = 0.1;
  std::string csv;
  std::string json;
  std::string svg;
  std::optional<SweepConfig> sweep;
};

/// Parsed but unresolved key/value tree with the line of every key.
struct RawConfig {
  boost::property_tree::ptree tree;
  std::map<std::string, std::string> origin;  // dotted key -> "file:line" or "command line"
  std::string source = "<config>";
};

/// INI syntax: "[section]" headers, "key = value" lines, ';' or '#' comments.
RawConfig parse_config(std::istream& in, const std::string& source);
RawConfig load_config_file(const std::string& path);

/// Sets a dotted key, e.g. "worldline.a". Unknown keys are a ConfigError.
void apply_override(RawConfig& raw, const std::string& key, const std::string& value);

/// Validates every key and resolves defaults.
RunConfig resolve(const RawConfig& raw);

/// Every accepted dotted key.
const std::vector<std::string>& known_keys();

}  // namespace qzeno::app
