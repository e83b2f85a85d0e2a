#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qzeno/app/config.hpp"
#include "qzeno/quad.hpp"
#include "qzeno/worldline.hpp"
#include "qzeno/zeno.hpp"

namespace qzeno::app {

inline constexpr std::string_view kVersion = "0.1.0";

/// One computed curve. tau, s and gamma hold exactly the values written to
/// the CSV (12 significant digits), and the regimes are segmented from those,
/// so re-reading the file reproduces the regime column.
struct RunResult {
  RunConfig config;
  std::vector<double> tau;
  std::vector<double> survival;
  std::vector<double> gamma;
  std::vector<bool> valid;
  RegimeSegmentation regimes;
  OptimalInterval optimum{};
  std::uint64_t kernel_evals = 0;
  std::optional<ConvergenceReport> convergence;
  GridSpec grid;
  std::string worldline_description;
  double max_proper_acceleration = 0.0;
};

Worldline make_worldline(const RunConfig& c);

/// Quadrature settings after acceleration-aware defaults and config overrides.
GridSpec make_grid_spec(const RunConfig& c, const Worldline& w);

RunResult run_experiment(const RunConfig& c);

/// Rounds to the 12 significant digits used in CSV output.
double csv_round(double x);

std::string format_csv(const RunResult& r);

struct CsvRow {
  double tau;
  double s;
  double gamma;
  Regime regime;
  bool valid;
};

/// Reads the "tau,s,gamma,regime,valid" format back. Throws ValidationError.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Metadata sidecar. Everything except "timestamp" is a pure function of the run.
std::string format_json(const RunResult& r, const std::string& timestamp);

struct SvgSeries {
  std::string label;
  const RunResult* run;
  bool dashed = false;
};

/// Self-contained line plot of Gamma(tau). A single series gets full-height
/// regime shading; several series get one regime strip each along the bottom.
std::string render_svg(const std::string& title, const std::vector<SvgSeries>& series);

/// Writes csv, json and (if configured) svg for one run.
void write_outputs(const RunResult& r);

void write_text_file(const std::string& path, const std::string& text, const std::string& field);

std::string utc_timestamp();

/// One run per sweep value; files are named <csv stem>.<key leaf><value>.csv.
/// A configured svg path receives all curves overlaid.
std::vector<RunResult> run_sweep(const RawConfig& raw);

/// Canonical parameter sets for the figure recipes: shm, ua, bm, cm. Returns
/// the written paths.
std::vector<std::string> reproduce_figure(const std::string& id, const std::string& out_dir,
                                          bool convergence_check = true);

}  // namespace qzeno::app
