#include "qzeno/app/cli.hpp"

#include <CLI11.hpp>
#include <fstream>

#include "qzeno/app/config.hpp"
#include "qzeno/app/experiment.hpp"
#include "qzeno/errors.hpp"
#include "qzeno/parallel.hpp"

namespace qzeno::app {

namespace {

// "--section.key=value" or "--section.key value".
void apply_overrides(RawConfig& raw, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& token = extras[i];
    if (token.rfind("--", 0) != 0 || token.size() == 2)
      throw ConfigError("", "command line: unexpected argument \"" + token + "\"");
    std::string key = token.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else if (i + 1 < extras.size()) {
      value = extras[++i];
    } else {
      throw ConfigError(key, "command line: " + key + ": missing value");
    }
    apply_override(raw, key, value);
  }
}

void print_segments(std::ostream& out, const RunResult& r) {
  out << "  regimes:";
  for (const auto& s : r.regimes.segments) out << " [" << s.tau_start << ", " << s.tau_end << "] " << to_string(s.label);
  out << "\n  optimal interval: tau = " << r.optimum.tau << ", gamma = " << r.optimum.gamma << "\n";
}

void print_convergence(std::ostream& out, std::ostream& err, const RunResult& r) {
  if (!r.convergence) return;
  const auto& c = *r.convergence;
  out << "  convergence at tau = " << c.t_max << ": relative change " << c.relative_difference << " (tolerance "
      << c.tolerance << ") " << (c.passed ? "passed" : "FAILED") << "\n";
  if (!c.passed) err << "warning: " << c.advice << "\n";
}

int command_run(const RawConfig& raw, std::ostream& out, std::ostream& err) {
  const RunResult r = run_experiment(resolve(raw));
  write_outputs(r);
  out << "wrote " << r.config.csv << " (" << r.tau.size() << " points, " << r.kernel_evals << " kernel evaluations)\n";
  print_segments(out, r);
  print_convergence(out, err, r);
  return kExitOk;
}

int command_sweep(const RawConfig& raw, std::ostream& out, std::ostream& err) {
  const auto runs = run_sweep(raw);
  for (const auto& r : runs) {
    out << "wrote " << r.config.csv << "\n";
    print_segments(out, r);
    print_convergence(out, err, r);
  }
  return kExitOk;
}

int command_convergence(const RawConfig& raw, std::ostream& out) {
  RunConfig c = resolve(raw);
  c.quadrature.convergence_check = true;
  const RunResult r = run_experiment(c);
  const auto& rep = *r.convergence;
  out << "I(" << rep.t_max << ") = " << rep.value.real() << " + " << rep.value.imag() << "i\n"
      << "refined   = " << rep.refined_value.real() << " + " << rep.refined_value.imag() << "i\n"
      << "relative change " << rep.relative_difference << ", tolerance " << rep.tolerance << ": "
      << (rep.passed ? "passed" : "FAILED") << "\n";
  if (!rep.passed) {
    out << rep.advice << "\n";
    throw ContractViolation("quadrature.convergence", "refined quadrature changed I(T) by more than the tolerance");
  }
  return kExitOk;
}

int command_validate(const std::string& path, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw ConfigError("worldline.path", path + ": cannot open");
  Worldline w = [&] {
    try {
      return load_sampled_worldline(in);
    } catch (const ValidationError& e) {
      throw ConfigError("worldline.path", path + ": " + e.what());
    }
  }();
  out << path << ": ok\n  " << w.describe() << "\n  proper-time range [0, " << w.tau_max()
      << "]\n  max proper acceleration " << w.max_proper_acceleration() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qubit decoherence and Zeno/anti-Zeno analysis on relativistic worldlines", "qzeno"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: $QZENO_THREADS or all cores)");

  std::string config_path, figure, out_dir = "figures", csv_path;
  bool no_convergence = false;
  auto config_command = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "config file")->required();
    sub->allow_extras();
    sub->footer("Any config key may be overridden as --section.key=value.");
    return sub;
  };
  auto* run = config_command("run", "compute one survival and decay-rate curve");
  auto* sweep = config_command("sweep", "repeat a run over the [sweep] values");
  auto* conv = config_command("convergence-check", "compare I(tau_max) against doubled panel densities");
  auto* fig = app.add_subcommand("reproduce-figure", "run a canonical figure recipe");
  fig->add_option("id", figure, "shm, ua, bm or cm")->required()->check(CLI::IsMember({"shm", "ua", "bm", "cm"}));
  fig->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  fig->add_flag("--no-convergence", no_convergence, "skip the refined convergence pass");
  auto* validate = app.add_subcommand("validate-worldline", "check a t,x,y,z worldline CSV");
  validate->add_option("csv", csv_path, "worldline table")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (fig->parsed()) {
      for (const auto& path : reproduce_figure(figure, out_dir, !no_convergence)) out << "wrote " << path << "\n";
      return kExitOk;
    }
    if (validate->parsed()) return command_validate(csv_path, out);
    CLI::App* sub = run->parsed() ? run : sweep->parsed() ? sweep : conv;
    RawConfig raw = load_config_file(config_path);
    apply_overrides(raw, sub->remaining());
    if (sub == run) return command_run(raw, out, err);
    if (sub == sweep) return command_sweep(raw, out, err);
    return command_convergence(raw, out);
  } catch (const ContractViolation& e) {
    err << "contract violation [" << e.invariant() << "]: " << e.what() << "\n";
    return kExitContract;
  } catch (const DomainError& e) {
    err << "contract violation [domain]: " << e.what() << "\n";
    return kExitContract;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RangeError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace qzeno::app
