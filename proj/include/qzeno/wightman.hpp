#pragma once

#include <complex>
#include <span>

#include "qzeno/quad.hpp"
#include "qzeno/worldline.hpp"

namespace qzeno {

using Complex = std::complex<double>;

struct ComplexFourVector {
  Complex t;
  Complex x;
  Complex y;
  Complex z;
};

/// t^2 - x^2 - y^2 - z^2 in complex arithmetic (no conjugation).
constexpr Complex minkowski_square(const ComplexFourVector& q) {
  return q.t * q.t - q.x * q.x - q.y * q.y - q.z * q.z;
}

/// Detector size scale epsilon (eV^-1), strictly positive.
struct RegularizationParams {
  double epsilon;

  explicit RegularizationParams(double eps);
};

/// Regularized vacuum Wightman function of the massless scalar field for a
/// pair of events with future-pointing 4-velocities:
///
///   W = -1 / (4 pi^2 s.s),   s = dx - i eps (u1 + u2).
///
/// On a stationary worldline this is -1 / (4 pi^2 (dtau - 2 i eps)^2).
Complex wightman(const Separation& sep, const RegularizationParams& reg);

/// W_eps(tau1, tau2) along `w`.
Complex wightman(const Worldline& w, double tau1, double tau2, const RegularizationParams& reg);

/// W_eps along a worldline as a quadrature kernel. Positions are looked up
/// once per block row/column, so a p x q block costs p + q worldline queries.
class WightmanKernel : public HermitianKernel {
 public:
  WightmanKernel(Worldline worldline, RegularizationParams reg)
      : worldline_(std::move(worldline)), reg_(reg) {}

  void evaluate_block(std::span<const double> tau1, std::span<const double> tau2,
                      std::span<Complex> out) const override;

  const Worldline& worldline() const { return worldline_; }
  const RegularizationParams& regularization() const { return reg_; }

 private:
  Worldline worldline_;
  RegularizationParams reg_;
};

/// Quadrature defaults for W_eps along `w`: GridSpec::for_regularization,
/// with diagonal panels no wider than 1 / alpha (alpha the largest proper
/// acceleration) and, for worldlines whose kernel is not a function of
/// tau1 - tau2 alone, base panels no wider than 0.5 / alpha everywhere. The
/// 4-velocity of an oscillating qubit swings through its peak rapidity within
/// a proper time of order 1 / alpha, and W picks up that structure far from
/// the diagonal too.
GridSpec default_grid_spec(const Worldline& w, const RegularizationParams& reg,
                           std::vector<double> t_grid);

}  // namespace qzeno
