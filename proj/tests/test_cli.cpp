#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "qzeno/app/cli.hpp"
#include "qzeno/app/config.hpp"
#include "qzeno/app/experiment.hpp"
#include "qzeno/parallel.hpp"
#include "qzeno/spectral.hpp"

using namespace qzeno;
using namespace qzeno::app;
namespace fs = std::filesystem;

namespace {

const std::string kStationary = R"([worldline]
family = stationary

[channel]
type = sigma_z_exact

[ohmic]
G = 0.01
omega_c = 10

[grid]
tau_min = 0.02
tau_max = 3
n_points = 60
)";

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("qzeno_test_cli_" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // Config text plus an [output] section pointing into the scratch directory.
  std::string config(const std::string& name, const std::string& body, const std::string& csv) const {
    return write(name, body + "\n[output]\ncsv = " + path(csv) + "\n");
  }
};

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qzeno");
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

RunConfig resolve_text(const std::string& text) {
  std::istringstream in(text);
  return resolve(parse_config(in, "test.ini"));
}

}  // namespace

TEST_CASE("stationary exact run matches the spectral closed form") {
  Scratch s;
  const auto cfg = s.config("st.ini", kStationary, "st.csv");
  const Outcome o = cli({"run", cfg});
  REQUIRE(o.status == 0);
  const auto rows = parse_csv(s.read("st.csv"));
  REQUIRE(rows.size() == 60);
  for (const auto& row : rows) {
    const double chi = chi_stationary_analytic({0.01, 10.0}, row.tau);
    const double want = -std::log(0.5 * (1 + std::exp(chi))) / row.tau;
    CHECK(std::abs(row.gamma - want) <= 1e-6 * want);
    CHECK(row.valid);
  }
}

TEST_CASE("csv round trip reproduces the regime column") {
  Scratch s;
  const std::string oscillating = R"([worldline]
family = oscillating
omega = 1.98
v = 0.99
[channel]
type = sigma_z_exact
[ohmic]
G = 0.01
omega_c = 10
[grid]
tau_max = 3
n_points = 40
[quadrature]
convergence_check = false
)";
  for (const auto& [name, body] : {std::pair{"st", kStationary}, std::pair{"osc", oscillating}}) {
    const auto cfg = s.config(std::string(name) + ".ini", body, std::string(name) + ".csv");
    REQUIRE(cli({"run", cfg}).status == 0);
    const auto rows = parse_csv(s.read(std::string(name) + ".csv"));
    DecayCurve curve;
    for (const auto& r : rows) {
      curve.tau.push_back(r.tau);
      curve.gamma.push_back(r.gamma);
    }
    const auto seg = segment_regimes(curve, 1e-3);
    bool both = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(seg.point_labels[i] == rows[i].regime);
      both = both || rows[i].regime != rows[0].regime;
    }
    CHECK(both);
  }
}

TEST_CASE("output is deterministic across runs and thread counts") {
  Scratch s;
  const std::string body = R"([worldline]
family = circular
b = 0.5
v = 0.9
[channel]
type = sigma_x
[qubit]
c = 0.6283
epsilon = 0.05
[grid]
tau_max = 1.5
n_points = 30
)";
  const auto cfg = s.config("c.ini", body, "c.csv");
  std::string first;
  for (const char* threads : {"1", "4", "1"}) {
    REQUIRE(cli({"--threads", threads, "run", cfg}).status == 0);
    const std::string csv = s.read("c.csv");
    if (first.empty()) first = csv;
    CHECK(csv == first);
  }
  set_thread_count(0);
  const auto json = nlohmann::json::parse(s.read("c.json"));
  CHECK(json["version"] == "0.1.0");
  CHECK(json["kernel_evals"].get<std::uint64_t>() > 0);
  CHECK(json["convergence"]["passed"] == true);
  CHECK(json["config"]["worldline"]["family"] == "circular");
  CHECK(json.contains("timestamp"));
}

TEST_CASE("exit status contract") {
  Scratch s;
  SUBCASE("missing required field names the field") {
    const auto cfg = s.config("m.ini", "[worldline]\nfamily = stationary\n[ohmic]\nG = 0.01\nomega_c = 10\n", "m.csv");
    const Outcome o = cli({"run", cfg});
    CHECK(o.status == 2);
    CHECK(o.err.find("channel.type") != std::string::npos);
  }
  SUBCASE("syntax errors carry the line") {
    const auto cfg = s.write("bad.ini", "[worldline]\nfamily = stationary\nthis line has no equals sign\n");
    const Outcome o = cli({"run", cfg});
    CHECK(o.status == 2);
    CHECK(o.err.find("bad.ini:3") != std::string::npos);
  }
  SUBCASE("bad values carry the line and field") {
    const auto cfg = s.config("v.ini", kStationary + "[analysis]\nslope_tol = abc\n", "v.csv");
    const Outcome o = cli({"run", cfg});
    CHECK(o.status == 2);
    CHECK(o.err.find("v.ini:16: analysis.slope_tol") != std::string::npos);
  }
  SUBCASE("unknown keys are rejected") {
    const auto cfg = s.config("u.ini", kStationary + "[grid2]\nx = 1\n", "u.csv");
    CHECK(cli({"run", cfg}).status == 2);
    const auto ok = s.config("ok.ini", kStationary, "ok.csv");
    const Outcome o = cli({"run", ok, "--grid.bogus=1"});
    CHECK(o.status == 2);
    CHECK(o.err.find("grid.bogus") != std::string::npos);
  }
  SUBCASE("coupling parameterizations are mutually exclusive") {
    const auto cfg = s.config("x.ini", kStationary + "[qubit]\nc = 0.5\nepsilon = 0.05\n", "x.csv");
    const Outcome o = cli({"run", cfg});
    CHECK(o.status == 2);
    CHECK(o.err.find("not both") != std::string::npos);
  }
  SUBCASE("perturbative breakdown is a numerical contract violation") {
    const std::string body = R"([worldline]
family = stationary
[channel]
type = sigma_x
[qubit]
c = 20
epsilon = 0.05
[grid]
tau_max = 3
n_points = 10
)";
    const Outcome o = cli({"run", s.config("p.ini", body, "p.csv")});
    CHECK(o.status == 3);
    CHECK(o.err.find("contract violation") != std::string::npos);
  }
  SUBCASE("failed convergence check names the invariant") {
    const auto cfg = s.config("cc.ini", kStationary, "cc.csv");
    const Outcome o = cli({"convergence-check", cfg, "--quadrature.convergence_tolerance", "1e-300"});
    CHECK(o.status == 3);
    CHECK(o.err.find("quadrature.convergence") != std::string::npos);
    CHECK(cli({"convergence-check", cfg}).status == 0);
  }
  SUBCASE("unknown subcommand") { CHECK(cli({"frobnicate"}).status == 2); }
}

TEST_CASE("command line overrides use dotted names") {
  Scratch s;
  const auto cfg = s.config("o.ini", kStationary, "o.csv");
  REQUIRE(cli({"run", cfg, "--grid.n_points", "12", "--grid.tau_max=1"}).status == 0);
  const auto rows = parse_csv(s.read("o.csv"));
  REQUIRE(rows.size() == 12);
  CHECK(rows.back().tau == 1.0);
  for (const auto& key : known_keys()) CHECK(key.find('.') != std::string::npos);
}

TEST_CASE("config resolution") {
  const RunConfig c = resolve_text(kStationary + "[output]\ncsv = dir/run.csv\n");
  CHECK(c.epsilon == 0.05);
  CHECK(std::abs(c.coupling - 0.6283185307179586) < 1e-15);
  CHECK(c.json == "dir/run.json");
  CHECK(c.omega0 == 2.0);
  CHECK(c.delta == 0.0);

  const std::string orbit = "[worldline]\nfamily = circular\nv = 0.99\nomega = 9.9\n[channel]\ntype = sigma_x\n"
                            "[qubit]\nc = 0.6\nepsilon = 0.05\n[output]\ncsv = a.csv\n";
  CHECK(std::abs(resolve_text(orbit).worldline.b - 0.1) < 1e-15);
  CHECK_THROWS_AS(resolve_text(orbit + "[grid]\ntau_min = -1\n"), ConfigError);
  CHECK_THROWS_AS(resolve_text("[worldline]\nfamily = circular\nv = 1.2\nb = 1\n[channel]\ntype = sigma_x\n"
                               "[qubit]\nc = 0.6\nepsilon = 0.05\n[output]\ncsv = a.csv\n"),
                  ConfigError);
  CHECK_THROWS_AS(resolve_text(kStationary + "[output]\ncsv = a.csv\n[qubit]\ndelta = 0.3\n"), ConfigError);
  try {
    resolve_text("[worldline]\nfamily = uniform_acceleration\n[channel]\ntype = sigma_x\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "worldline.a");
  }
}

TEST_CASE("sweep writes one curve per value") {
  Scratch s;
  const std::string body = R"([worldline]
family = uniform_acceleration
a = 1
[channel]
type = sigma_x
[qubit]
c = 0.6283
epsilon = 0.05
[grid]
tau_min = 0.1
tau_max = 2
n_points = 20
[sweep]
parameter = worldline.a
values = 1, 10, 100
)";
  const auto cfg = s.write("sw.ini", body + "[output]\ncsv = " + s.path("ua.csv") + "\nsvg = " + s.path("ua.svg") + "\n");
  REQUIRE(cli({"sweep", cfg}).status == 0);
  for (const char* f : {"ua.a1.csv", "ua.a10.csv", "ua.a100.csv", "ua.a1.json", "ua.svg"}) CHECK(fs::exists(s.path(f)));
  CHECK(parse_csv(s.read("ua.a100.csv")).size() == 20);
  const std::string svg = s.read("ua.svg");
  CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
  CHECK(svg.find("href") == std::string::npos);
  CHECK(svg.find("a = 100") != std::string::npos);
}

TEST_CASE("benchmark figure overlays perturbative and exact curves") {
  Scratch s;
  const auto files = reproduce_figure("bm", s.dir.string(), false);
  CHECK(files.size() == 5);
  const auto p = parse_csv(s.read("bm_perturbative.csv"));
  const auto e = parse_csv(s.read("bm_exact.csv"));
  REQUIRE(p.size() == e.size());
  const double c2 = std::pow(map_params({0.01, 10.0}).coupling, 2);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i].tau == e[i].tau);
    CHECK(std::abs(p[i].gamma - e[i].gamma) <= c2 * e[i].gamma);
  }
  CHECK(fs::exists(s.path("bm.svg")));
  CHECK_THROWS_AS(reproduce_figure("nope", s.dir.string(), false), ConfigError);
}

TEST_CASE("validate-worldline") {
  Scratch s;
  std::string good = "t,x,y,z\n# helix\n";
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.02 * i;
    good += std::to_string(t) + "," + std::to_string(0.3 * std::sin(t)) + "," + std::to_string(0.3 * std::cos(t)) + ",0\n";
  }
  const Outcome ok = cli({"validate-worldline", s.write("good.csv", good)});
  CHECK(ok.status == 0);
  CHECK(ok.out.find("ok") != std::string::npos);

  const Outcome bad = cli({"validate-worldline", s.write("bad.csv", "t,x,y,z\n0,0,0,0\n1,0,0,0\n0.5,0,0,0\n2,0,0,0\n")});
  CHECK(bad.status == 2);
  CHECK(bad.err.find("bad.csv") != std::string::npos);
  CHECK(cli({"validate-worldline", s.path("absent.csv")}).status == 2);

  // A sampled worldline runs end to end.
  const std::string body = "[worldline]\nfamily = sampled\npath = " + s.path("good.csv") +
                           "\n[channel]\ntype = sigma_z_exact\n[ohmic]\nG = 0.01\nomega_c = 10\n"
                           "[grid]\ntau_max = 2\nn_points = 10\n";
  CHECK(cli({"run", s.config("sampled.ini", body, "sampled.csv")}).status == 0);
  CHECK(cli({"run", s.config("far.ini", body, "far.csv"), "--grid.tau_max=50"}).status == 2);
}
