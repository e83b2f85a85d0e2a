#include "qzeno/wightman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "qzeno/errors.hpp"

namespace qzeno {

namespace {

constexpr double kFourPiSquared = 4.0 * std::numbers::pi * std::numbers::pi;
constexpr double kDegenerate = 1e-30;

Complex wightman_from(const FourVector& dx, const FourVector& u1, const FourVector& u2,
                      double eps, double tau1, double tau2) {
  const ComplexFourVector s{{dx.t, -eps * (u1.t + u2.t)},
                            {dx.x, -eps * (u1.x + u2.x)},
                            {dx.y, -eps * (u1.y + u2.y)},
                            {dx.z, -eps * (u1.z + u2.z)}};
  const Complex sq = minkowski_square(s);
  if (std::abs(sq) < kDegenerate) {
    std::ostringstream os;
    os.precision(17);
    os << "degenerate Wightman denominator at (tau1, tau2) = (" << tau1 << ", " << tau2 << ")";
    throw ContractViolation("wightman.nondegenerate", os.str());
  }
  return -1.0 / (kFourPiSquared * sq);
}

}  // namespace

RegularizationParams::RegularizationParams(double eps) : epsilon(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    std::ostringstream os;
    os << "regularization requires epsilon > 0, got " << eps;
    throw ValidationError(os.str());
  }
}

Complex wightman(const Separation& sep, const RegularizationParams& reg) {
  return wightman_from(sep.dx, sep.u1, sep.u2, reg.epsilon, 0.0, 0.0);
}

Complex wightman(const Worldline& w, double tau1, double tau2, const RegularizationParams& reg) {
  const Separation sep = w.separation(tau1, tau2);
  return wightman_from(sep.dx, sep.u1, sep.u2, reg.epsilon, tau1, tau2);
}

void WightmanKernel::evaluate_block(std::span<const double> tau1, std::span<const double> tau2,
                                    std::span<Complex> out) const {
  const double eps = reg_.epsilon;
  const std::size_t n2 = tau2.size();
  switch (worldline_.family()) {
    case WorldlineFamily::stationary:
    case WorldlineFamily::uniform_acceleration:
      for (std::size_t i = 0; i < tau1.size(); ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
          const Separation sep = worldline_.separation(tau1[i], tau2[j]);
          out[i * n2 + j] = wightman_from(sep.dx, sep.u1, sep.u2, eps, tau1[i], tau2[j]);
        }
      }
      return;
    default:
      break;
  }
  std::vector<WorldlinePoint> rows(tau1.size());
  std::vector<WorldlinePoint> cols(n2);
  for (std::size_t i = 0; i < tau1.size(); ++i) rows[i] = worldline_.point(tau1[i]);
  for (std::size_t j = 0; j < n2; ++j) cols[j] = worldline_.point(tau2[j]);
  for (std::size_t i = 0; i < tau1.size(); ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      out[i * n2 + j] = wightman_from(rows[i].position - cols[j].position, rows[i].velocity,
                                      cols[j].velocity, eps, tau1[i], tau2[j]);
    }
  }
}

GridSpec default_grid_spec(const Worldline& w, const RegularizationParams& reg,
                           std::vector<double> t_grid) {
  GridSpec spec = GridSpec::for_regularization(std::move(t_grid), reg.epsilon);
  const double alpha = w.max_proper_acceleration();
  if (alpha > 0.0) {
    spec.diagonal_panel_width = std::min(spec.diagonal_panel_width, 1.0 / alpha);
    if (!w.is_stationary_orbit())
      spec.base_panels_per_unit =
          std::max(spec.base_panels_per_unit, static_cast<int>(std::ceil(alpha / 0.5)));
  }
  return spec;
}

}  // namespace qzeno
