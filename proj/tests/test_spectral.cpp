#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qzeno/dephasing.hpp"
#include "qzeno/errors.hpp"
#include "qzeno/spectral.hpp"
#include "qzeno/udw.hpp"
#include "support.hpp"

using namespace qzeno;
using qzeno::testing::linspace;
using qzeno::testing::rel;

namespace {
constexpr double pi = std::numbers::pi;
const OhmicParams kOhmic{0.01, 10.0};
}  // namespace

TEST_CASE("parameter map") {
  const auto m = map_params(kOhmic);
  CHECK(m.regularization.epsilon == 0.05);
  CHECK(rel(m.coupling, 0.6283185307179586) < 1e-15);
  CHECK(map_params({0.0, 10.0}).coupling == 0.0);
  const auto unit = map_params({1.0, 0.5});
  CHECK(unit.regularization.epsilon == 1.0);
  CHECK(rel(unit.coupling, 2 * pi) < 1e-15);
  CHECK_THROWS_AS(map_params({-1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(map_params({1.0, 0.0}), ValidationError);
}

TEST_CASE("spectral density") {
  CHECK(spectral_density(kOhmic, 0.0) == 0.0);
  CHECK(rel(spectral_density(kOhmic, 10.0), 0.1 * std::exp(-1.0)) < 1e-15);
  for (double w : linspace(0.0, 200.0, 50)) CHECK(spectral_density(kOhmic, w) >= 0.0);
}

TEST_CASE("transform identity c^2 W = int J e^{-i w d}") {
  const auto m = map_params(kOhmic);
  const auto w = Worldline::stationary();
  auto gen = testing::rng(13);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> ds{0.0};
  for (int k = 0; k < 20; ++k) ds.push_back(dist(gen));
  for (double d : ds) {
    const auto lhs = m.coupling * m.coupling * wightman(w, 5.0 + d, 5.0, m.regularization);
    CHECK(rel(lhs, bath_correlation(kOhmic, d)) < 1e-8);
    CHECK(rel(bath_correlation_numeric(kOhmic, d), lhs) < 1e-8);
  }
  // At coincidence both sides equal G w_c^2.
  CHECK(rel(bath_correlation(kOhmic, 0.0), std::complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("closed-form dephasing exponent") {
  CHECK(chi_stationary_analytic(kOhmic, 0.0) == 0.0);
  CHECK(std::abs(chi_stationary_analytic(kOhmic, 1.0) + 0.0923024) < 1e-6);
  // Logarithmic tail.
  const double t = 100.0;
  CHECK(rel(chi_stationary_analytic(kOhmic, t), -4 * 0.01 * std::log(10 * t)) < 1e-6);
  // Analytic double integral of (d - 2i eps)^-2.
  const double eps = 0.05;
  for (double T : {0.1, 1.0, 2.5}) {
    const double i_closed = (std::log(T * T + 4 * eps * eps) - std::log(4 * eps * eps)) / (4 * pi * pi);
    const double c = 2 * pi * 0.1;
    CHECK(rel(chi_stationary_analytic(kOhmic, T), -2 * c * c * i_closed) < 1e-13);
  }
}

TEST_CASE("closed form and the 2-D engine agree") {
  const auto m = map_params(kOhmic);
  const auto grid = linspace(0.01, 3.0, 40);
  const auto c = chi(Worldline::stationary(), {2.0, 0.0, m.coupling}, m.regularization,
                     GridSpec::for_regularization(grid, m.regularization.epsilon));
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(rel(c[i], chi_stationary_analytic(kOhmic, grid[i])) < 1e-6);
}

TEST_CASE("sigma_x survival oracle") {
  CHECK(survival_sx_stationary_oracle(kOhmic, 2.0, 0.0) == 1.0);
  for (double t : {0.5, 2.0}) CHECK(survival_sx_stationary_oracle({0.0, 10.0}, 2.0, t) == 1.0);

  // Pinned value at t = 1 and the dual-method agreement.
  const double pinned = survival_sx_stationary_oracle(kOhmic, 2.0, 1.0);
  CHECK(pinned < 1.0);
  CHECK(pinned > 0.8);
  const auto m = map_params(kOhmic);
  const auto grid = linspace(0.02, 3.0, 12);
  const auto r = survival_perturbative(Worldline::stationary(), {2.0, 0.0, m.coupling}, ChannelSpec::sigma_x(),
                                       m.regularization, GridSpec::for_regularization(grid, m.regularization.epsilon));
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(rel(r.survival[i], survival_sx_stationary_oracle(kOhmic, 2.0, grid[i])) < 1e-4);
  const auto one = survival_perturbative(Worldline::stationary(), {2.0, 0.0, m.coupling}, ChannelSpec::sigma_x(),
                                         m.regularization, GridSpec::for_regularization({1.0}, m.regularization.epsilon));
  CHECK(rel(one.survival[0], pinned) < 1e-4);
}
