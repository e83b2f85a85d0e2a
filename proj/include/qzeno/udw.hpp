#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "qzeno/dephasing.hpp"
#include "qzeno/quad.hpp"
#include "qzeno/wightman.hpp"
#include "qzeno/zeno.hpp"

namespace qzeno {

using Matrix2 = Eigen::Matrix2cd;

enum class CouplingOperator { sigma_x, sigma_z };

Matrix2 pauli(CouplingOperator op);

/// Coupling operator and pure initial qubit state. Basis order (|up>, |down>),
/// sigma_z |up> = |up>.
struct ChannelSpec {
  CouplingOperator coupling = CouplingOperator::sigma_x;
  Matrix2 initial_state = Matrix2::Zero();

  /// sigma_x coupling starting in |up><up|.
  static ChannelSpec sigma_x();
  /// sigma_z coupling starting in |+><+|.
  static ChannelSpec sigma_z();

  /// Hermitian, unit trace, positive semidefinite and pure. Throws ValidationError.
  void validate() const;

  /// 1 - rho0, the projector orthogonal to the initial state.
  Matrix2 orthogonal_projector() const;
};

/// c e^{i H tau} sigma_i e^{-i H tau} with H = omega0 sigma_z + delta sigma_x.
Matrix2 interaction_picture_coupling(const QubitParams& q, const ChannelSpec& ch, double tau);

/// Tr{ P_perp [F(tau2) rho0, F(tau1)] } by explicit matrix algebra.
std::complex<double> trace_factor(const QubitParams& q, const ChannelSpec& ch, double tau1,
                                  double tau2);

/// W_eps(tau1, tau2) times the channel trace factor.
class PerturbativeKernel : public HermitianKernel {
 public:
  PerturbativeKernel(Worldline worldline, QubitParams qubit, ChannelSpec channel,
                     RegularizationParams reg);

  void evaluate_block(std::span<const double> tau1, std::span<const double> tau2,
                      std::span<std::complex<double>> out) const override;

 private:
  WightmanKernel wightman_;
  QubitParams qubit_;
  ChannelSpec channel_;
  Matrix2 projector_;
};

struct PerturbativeResult {
  std::vector<double> tau_grid;
  std::vector<double> survival;
  std::vector<bool> valid;  // 1 - s within the trusted range
  std::uint64_t kernel_evals = 0;
};

/// Second-order survival probability
///
///   s(T) = 1 - 2 Re int_0^T dtau1 int_0^tau1 dtau2 W(tau1, tau2) Tr{P_perp [F2 rho0, F1]},
///
/// evaluated as 1 - (integral of the Hermitian kernel over [0, T]^2).
PerturbativeResult survival_perturbative(const Worldline& w, const QubitParams& q,
                                         const ChannelSpec& ch, const RegularizationParams& reg,
                                         const GridSpec& spec, double validity_threshold = 0.1);

/// Gamma_k = -ln(s_k) / tau_k. Throws DomainError for s <= 0 or tau <= 0.
DecayCurve decay_rate(std::span<const double> tau_grid, std::span<const double> survival);

}  // namespace qzeno
