#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qzeno/errors.hpp"
#include "qzeno/parallel.hpp"
#include "qzeno/quad.hpp"
#include "qzeno/wightman.hpp"
#include "support.hpp"

using namespace qzeno;
using qzeno::testing::linspace;
using qzeno::testing::rel;

namespace {

constexpr double pi = std::numbers::pi;

GridSpec plain(std::vector<double> grid) {
  GridSpec spec;
  spec.t_grid = std::move(grid);
  spec.diagonal_panel_width = 1.0;
  return spec;
}

// Dense composite Simpson oracle for |int_0^T e^{ia} da|^2, independent of
// the engine.
double dense_phase_oracle(double T) {
  const int n = 20000;
  const double h = T / n;
  std::complex<double> s{};
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * std::exp(std::complex<double>(0, k * h));
  }
  return std::norm(s * h / 3.0);
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int order : {4, 8, 16}) {
    const auto& r = gauss_legendre(order);
    double sum = 0.0, x2n = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      sum += r.weights[k];
      x2n += r.weights[k] * std::pow(r.nodes[k], 2 * order - 2);
    }
    CHECK(std::abs(sum - 2.0) < 1e-14);
    CHECK(std::abs(x2n - 2.0 / (2 * order - 1)) < 1e-14);
  }
}

TEST_CASE("unit kernel gives square areas") {
  const FunctionKernel one([](double, double) { return std::complex<double>(1, 0); });
  const auto r = cumulative_square_integral(one, plain({1.0, 2.0}));
  CHECK(std::abs(r.values[0] - 1.0) < 1e-14);
  CHECK(std::abs(r.values[1] - 4.0) < 1e-13);
  const auto c = convergence_check(one, plain({1.0, 2.0}));
  CHECK(c.relative_difference < 1e-14);
  CHECK(c.passed);
}

TEST_CASE("separable phase kernel") {
  const FunctionKernel k([](double a, double b) { return std::exp(std::complex<double>(0, a - b)); });
  const auto r = cumulative_square_integral(k, plain({1.0, 2.0, pi}));
  CHECK(std::abs(r.values[2] - 4.0) < 1e-12);
  for (std::size_t i = 0; i < 3; ++i) {
    const double T = std::vector<double>{1.0, 2.0, pi}[i];
    CHECK(rel(r.values[i].real(), 2 * (1 - std::cos(T))) < 1e-12);
    CHECK(rel(r.values[i].real(), dense_phase_oracle(T)) < 1e-10);
    CHECK(std::abs(r.values[i].imag()) < 1e-14);
  }
}

TEST_CASE("stationary Wightman kernel against the closed form") {
  const double eps = 0.05;
  const WightmanKernel k(Worldline::stationary(), RegularizationParams(eps));
  auto spec = GridSpec::for_regularization(linspace(0.01, 3.0, 50), eps);
  spec.gauss_order = 16;
  const auto r = cumulative_square_integral(k, spec);
  for (std::size_t i = 0; i < spec.t_grid.size(); ++i) {
    const double T = spec.t_grid[i];
    const double want = std::log1p(T * T / (4 * eps * eps)) / (4 * pi * pi);
    CHECK(rel(r.values[i].real(), want) < 1e-6);
    CHECK(std::abs(r.values[i].imag()) < 1e-10 * std::abs(r.values[i]) + 1e-14);
  }
}

TEST_CASE("refinement converges monotonically on the stationary kernel") {
  const double eps = 0.05;
  const WightmanKernel k(Worldline::stationary(), RegularizationParams(eps));
  const double want = std::log1p(4.0 / (4 * eps * eps)) / (4 * pi * pi);
  GridSpec spec;
  spec.t_grid = {2.0};
  spec.gauss_order = 4;
  spec.diagonal_refine_width = 8 * eps;
  spec.diagonal_panel_width = eps;
  double prev = 1.0;
  for (int level = 0; level < 4; ++level) {
    const double err = rel(cumulative_square_integral(k, spec).values[0].real(), want);
    CHECK(err < prev);
    prev = err;
    spec = spec.refined();
  }
  const auto report =
      convergence_check(k, GridSpec::for_regularization({2.0}, eps));
  CHECK(report.relative_difference < 1e-6);
  CHECK(report.passed);
  CHECK(report.advice.empty());
}

TEST_CASE("incremental evaluation equals from-scratch evaluation") {
  const WightmanKernel k(Worldline::oscillating(0.5, 0.99, 4.0), RegularizationParams(0.05));
  const auto grid = linspace(0.1, 3.0, 30);
  const auto all = cumulative_square_integral(k, default_grid_spec(k.worldline(), k.regularization(), grid));
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{18}, std::size_t{29}}) {
    const auto single = default_grid_spec(k.worldline(), k.regularization(), {grid[i]});
    CHECK(rel(all.values[i], cumulative_square_integral(k, single).values[0]) < 1e-10);
  }
}

TEST_CASE("worldline-aware defaults converge on the oscillating kernel") {
  const WightmanKernel k(Worldline::oscillating(0.5, 0.99, 4.0), RegularizationParams(0.05));
  const auto spec = default_grid_spec(k.worldline(), k.regularization(), {3.0});
  CHECK(spec.base_panels_per_unit > 8);
  const auto r = convergence_check(k, spec, 1e-5);
  CHECK(r.passed);
  CHECK(r.relative_difference < 1e-8);
}

TEST_CASE("kernel evaluations grow at most quadratically in the grid size") {
  const WightmanKernel k(Worldline::stationary(), RegularizationParams(0.05));
  const auto a = cumulative_square_integral(k, GridSpec::for_regularization(linspace(0.1, 3.0, 50), 0.05));
  const auto b = cumulative_square_integral(k, GridSpec::for_regularization(linspace(0.1, 3.0, 200), 0.05));
  CHECK(b.kernel_evals <= 20 * a.kernel_evals);
  CHECK(a.kernel_evals > 0);
}

TEST_CASE("results do not depend on the thread count") {
  const WightmanKernel k(Worldline::circular(0.5, 0.99, 4.0), RegularizationParams(0.05));
  const auto spec = GridSpec::for_regularization(linspace(0.05, 2.0, 20), 0.05);
  set_thread_count(1);
  const auto one = cumulative_square_integral(k, spec);
  for (std::size_t n : {2u, 4u, 8u}) {
    set_thread_count(n);
    const auto many = cumulative_square_integral(k, spec);
    for (std::size_t i = 0; i < one.values.size(); ++i) CHECK(many.values[i] == one.values[i]);
    CHECK(many.kernel_evals == one.kernel_evals);
  }
  set_thread_count(0);
}

TEST_CASE("non-Hermitian kernels are rejected") {
  const FunctionKernel bad([](double a, double b) { return std::complex<double>(a, b); });
  try {
    cumulative_square_integral(bad, plain({1.0}));
    FAIL("expected a contract violation");
  } catch (const ContractViolation& e) {
    CHECK(e.invariant() == "quad.hermitian");
  }
}

TEST_CASE("grid validation") {
  const FunctionKernel one([](double, double) { return std::complex<double>(1, 0); });
  CHECK_THROWS_AS(cumulative_square_integral(one, plain({})), ValidationError);
  CHECK_THROWS_AS(cumulative_square_integral(one, plain({1.0, 1.0})), ValidationError);
  CHECK_THROWS_AS(cumulative_square_integral(one, plain({-1.0, 1.0})), ValidationError);
  auto spec = plain({1.0});
  spec.gauss_order = 5;
  CHECK_THROWS_AS(cumulative_square_integral(one, spec), ValidationError);
  spec = plain({1.0});
  spec.base_panels_per_unit = 4;
  CHECK_THROWS_AS(cumulative_square_integral(one, spec), ValidationError);
}

TEST_CASE("failed convergence reports refinement advice") {
  const WightmanKernel k(Worldline::stationary(), RegularizationParams(0.05));
  GridSpec coarse;
  coarse.t_grid = {2.0};
  coarse.gauss_order = 4;
  coarse.diagonal_panel_width = 0.5;
  const auto r = convergence_check(k, coarse);
  CHECK_FALSE(r.passed);
  CHECK(r.advice.find("base_panels_per_unit") != std::string::npos);
}

TEST_CASE("pairwise sum is exact on small integers") {
  std::vector<std::complex<double>> v(1000, {1.0, -1.0});
  CHECK(pairwise_sum(v) == std::complex<double>(1000, -1000));
  CHECK(pairwise_sum({}) == std::complex<double>{});
}
