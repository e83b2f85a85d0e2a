#include "qzeno/spectral.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qzeno/errors.hpp"

namespace qzeno {

namespace {

constexpr double kCutoffMultiple = 40.0;

// Adaptive G-K over [a, b] split into pieces no wider than `piece`.
template <class F>
double integrate(F f, double a, double b, double piece) {
  using boost::math::quadrature::gauss_kronrod;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / piece)));
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double lo = a + (b - a) * k / n;
    const double hi = k + 1 == n ? b : a + (b - a) * (k + 1) / n;
    total += gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, 1e-12);
  }
  return total;
}

}  // namespace

void OhmicParams::validate() const {
  if (!(G >= 0.0) || !std::isfinite(G)) throw ValidationError("ohmic: G must be >= 0");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c))
    throw ValidationError("ohmic: omega_c must be > 0");
}

MappedParams map_params(const OhmicParams& p) {
  p.validate();
  return {RegularizationParams(1.0 / (2.0 * p.omega_c)), 2.0 * std::numbers::pi * std::sqrt(p.G)};
}

double spectral_density(const OhmicParams& p, double omega) {
  return p.G * omega * std::exp(-omega / p.omega_c);
}

std::complex<double> bath_correlation(const OhmicParams& p, double dtau) {
  const std::complex<double> d(1.0 / p.omega_c, dtau);
  return p.G / (d * d);
}

std::complex<double> bath_correlation_numeric(const OhmicParams& p, double dtau) {
  const double upper = kCutoffMultiple * p.omega_c;
  const double piece = std::min(p.omega_c, dtau != 0.0 ? std::numbers::pi / std::abs(dtau) : upper);
  const double re = integrate(
      [&](double w) { return spectral_density(p, w) * std::cos(w * dtau); }, 0.0, upper, piece);
  const double im = integrate(
      [&](double w) { return -spectral_density(p, w) * std::sin(w * dtau); }, 0.0, upper, piece);
  return {re, im};
}

double chi_stationary_analytic(const OhmicParams& p, double t) {
  if (t < 0.0) {
    std::ostringstream os;
    os << "chi_stationary_analytic requires t >= 0, got " << t;
    throw DomainError(os.str());
  }
  return -2.0 * p.G * std::log1p(p.omega_c * p.omega_c * t * t);
}

double survival_sx_stationary_oracle(const OhmicParams& p, double omega0, double t) {
  if (t < 0.0) {
    std::ostringstream os;
    os << "survival oracle requires t >= 0, got " << t;
    throw DomainError(os.str());
  }
  if (t == 0.0 || p.G == 0.0) return 1.0;
  const double resonance = 2.0 * omega0;
  // 4 sin^2(x t / 2) / x^2 = t^2 sinc^2(x t / 2), finite at resonance.
  auto integrand = [&](double w) {
    const double arg = 0.5 * (w - resonance) * t;
    const double sinc = std::abs(arg) < 1e-8 ? 1.0 - arg * arg / 6.0 : std::sin(arg) / arg;
    return spectral_density(p, w) * t * t * sinc * sinc;
  };
  const double upper = kCutoffMultiple * p.omega_c;
  const double piece = std::min(p.omega_c / 2.0, std::numbers::pi / t);
  double total = 0.0;
  if (resonance > 0.0 && resonance < upper) {
    total = integrate(integrand, 0.0, resonance, piece) +
            integrate(integrand, resonance, upper, piece);
  } else {
    total = integrate(integrand, 0.0, upper, piece);
  }
  return 1.0 - total;
}

}  // namespace qzeno
