#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "qzeno/errors.hpp"
#include "qzeno/wightman.hpp"
#include "support.hpp"

using namespace qzeno;
using qzeno::testing::linspace;
using qzeno::testing::rel;

namespace {

constexpr double pi = std::numbers::pi;

Complex stationary_closed_form(double d, double eps) {
  const Complex s(d, -2 * eps);
  return -1.0 / (4 * pi * pi * s * s);
}

Complex rindler_closed_form(double a, double d, double eps) {
  const Complex s(std::sinh(a * d / 2), -eps * a * std::cosh(a * d / 2));
  return -(a * a / (16 * pi * pi)) / (s * s);
}

Worldline sampled_oscillation() {
  std::vector<FourVector> events;
  for (double t : linspace(0.0, 12.0, 600)) events.push_back({t, 0.4 * std::sin(1.5 * t), 0.1 * t, 0});
  return Worldline::sampled(events);
}

std::vector<Worldline> families() {
  return {Worldline::stationary(), Worldline::uniform_acceleration(3.0),
          Worldline::oscillating(0.5, 0.99, 6.0), Worldline::circular(0.5, 0.99, 6.0),
          sampled_oscillation()};
}

}  // namespace

TEST_CASE("complex minkowski square") {
  CHECK(minkowski_square(ComplexFourVector{1, 0, 0, 0}) == Complex(1, 0));
  CHECK(minkowski_square(ComplexFourVector{0, 1, 0, 0}) == Complex(-1, 0));
  const Complex q = minkowski_square(ComplexFourVector{Complex(1, -0.1), 0.2, 0, 0});
  CHECK(std::abs(q - Complex(0.95, -0.2)) < 1e-15);
}

TEST_CASE("regularization must be positive") {
  CHECK_THROWS_AS(RegularizationParams(0.0), ValidationError);
  CHECK_THROWS_AS(RegularizationParams(-1.0), ValidationError);
  CHECK(RegularizationParams(0.05).epsilon == 0.05);
}

TEST_CASE("stationary limit") {
  const RegularizationParams reg(0.05);
  const auto w = Worldline::stationary();
  for (double t1 : {0.0, 0.3, 2.0})
    for (double t2 : {0.0, 0.7, 1.9}) CHECK(rel(wightman(w, t1, t2, reg), stationary_closed_form(t1 - t2, 0.05)) < 1e-14);
  // Coincidence value 1 / (16 pi^2 eps^2).
  CHECK(rel(wightman(w, 1.0, 1.0, reg), Complex(1.0 / (16 * pi * pi * 0.0025), 0)) < 1e-14);
}

TEST_CASE("Rindler closed form") {
  auto gen = testing::rng(11);
  std::uniform_real_distribution<double> dist(0.0, 3.0);
  for (double a : {1.0, 10.0, 100.0}) {
    const auto w = Worldline::uniform_acceleration(a);
    const RegularizationParams reg(0.05);
    for (int k = 0; k < 100; ++k) {
      const double t1 = dist(gen), t2 = dist(gen);
      const Complex want = rindler_closed_form(a, t1 - t2, 0.05);
      if (std::abs(want) < 1e-250) continue;
      CHECK(rel(wightman(w, t1, t2, reg), want) < 1e-12);
    }
  }
}

TEST_CASE("Hermiticity on every family") {
  const RegularizationParams reg(0.05);
  auto gen = testing::rng(5);
  for (const auto& w : families()) {
    std::uniform_real_distribution<double> dist(0.0, std::min(w.tau_max(), 5.0));
    for (int k = 0; k < 200; ++k) {
      const double a = dist(gen), b = dist(gen);
      const Complex wab = wightman(w, a, b, reg);
      const Complex wba = wightman(w, b, a, reg);
      CHECK(std::abs(wab - std::conj(wba)) <= 1e-14 * std::abs(wab));
    }
  }
}

TEST_CASE("stationarity of stationary and uniformly accelerated kernels") {
  const RegularizationParams reg(0.05);
  auto gen = testing::rng(9);
  std::uniform_real_distribution<double> dist(0.0, 3.0);
  for (const auto& w : {Worldline::stationary(), Worldline::uniform_acceleration(1.0),
                        Worldline::uniform_acceleration(10.0)}) {
    for (int k = 0; k < 100; ++k) {
      const double a = dist(gen), b = dist(gen), s = dist(gen);
      const Complex base = wightman(w, a, b, reg);
      CHECK(std::abs(wightman(w, a + s, b + s, reg) - base) < 1e-12 * std::max(1.0, std::abs(base)));
    }
  }
}

TEST_CASE("Lorentz invariance under a boost of a sampled worldline") {
  std::vector<FourVector> events, boosted;
  for (double t : linspace(0.0, 6.0, 4000)) events.push_back({t, 0.3 * std::sin(2.0 * t), 0.2 * std::cos(t), 0});
  for (const auto& e : events) boosted.push_back(boost_x(e, 0.3));
  const auto w = Worldline::sampled(events);
  const auto wb = Worldline::sampled(boosted);
  // Boosting reorders nothing in time here, and proper time starts at the
  // first event in both frames.
  const RegularizationParams reg(0.05);
  const double top = std::min(w.tau_max(), wb.tau_max());
  for (double t1 : linspace(0.0, top, 9))
    for (double t2 : linspace(0.0, top, 7)) {
      const Complex a = wightman(w, t1, t2, reg);
      const Complex b = wightman(wb, t1, t2, reg);
      CHECK(rel(b, a) < 1e-8);
    }
}

TEST_CASE("positive semidefinite on random 8-point sets") {
  const RegularizationParams reg(0.05);
  auto gen = testing::rng(21);
  std::normal_distribution<double> normal;
  for (const auto& w : families()) {
    std::uniform_real_distribution<double> dist(0.0, std::min(w.tau_max(), 4.0));
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 7;
      std::vector<double> tau(n);
      for (auto& t : tau) t = dist(gen);
      Eigen::MatrixXcd m(n, n);
      double biggest = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          m(i, j) = wightman(w, tau[i], tau[j], reg);
          biggest = std::max(biggest, std::abs(m(i, j)));
        }
      Eigen::VectorXcd c(n);
      double norm = 0.0;
      for (int i = 0; i < n; ++i) {
        c(i) = Complex(normal(gen), normal(gen));
        norm += std::norm(c(i));
      }
      const double q = (c.adjoint() * m * c)(0, 0).real();
      CHECK(q >= -1e-10 * norm * biggest);
    }
  }
}

TEST_CASE("epsilon to zero converges linearly") {
  const double d = 0.8;
  const double limit = -1.0 / (4 * pi * pi * d * d);
  const auto w = Worldline::stationary();
  double prev_err = 0.0;
  for (double eps : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
    const double err = std::abs(wightman(w, d, 0.0, RegularizationParams(eps)) - limit);
    if (prev_err > 0.0) CHECK(std::abs(prev_err / err - 2.0) < 0.01);
    prev_err = err;
  }
}

TEST_CASE("kernel blocks agree with pointwise evaluation") {
  const RegularizationParams reg(0.05);
  for (const auto& w : families()) {
    const WightmanKernel k(w, reg);
    const std::vector<double> a = linspace(0.0, 2.0, 5), b = linspace(0.1, 3.0, 4);
    std::vector<Complex> out(a.size() * b.size());
    k.evaluate_block(a, b, out);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        CHECK(rel(out[i * b.size() + j], wightman(w, a[i], b[j], reg)) < 1e-13);
  }
}
