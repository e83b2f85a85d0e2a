#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qzeno/quad.hpp"
#include "qzeno/wightman.hpp"
#include "qzeno/worldline.hpp"

namespace qzeno {

/// H_TLS = omega0 sigma_z + delta sigma_x, coupling c sigma_i (x) phi.
struct QubitParams {
  double omega0 = 0.0;
  double delta = 0.0;
  double coupling = 0.0;

  void validate() const;
};

struct DephasingResult {
  std::vector<double> tau_grid;
  std::vector<double> chi;                  // rho_01(tau) = rho_01(0) e^chi (times the free phase)
  std::vector<double> survival;
  std::vector<double> coherence_magnitude;  // e^chi
  std::uint64_t kernel_evals = 0;
};

/// Exact pure-dephasing solution (sigma_z coupling, delta = 0) at vacuum:
///
///   chi(T) = -2 c^2 Re  int_0^T int_0^T W_eps(tau, tau') dtau dtau'.
///
/// Throws ContractViolation if the integral is not real to within
/// 1e-10 |I| + 1e-14, or if chi exceeds 1e-12.
DephasingResult solve_dephasing(const Worldline& w, const QubitParams& q,
                                const RegularizationParams& reg, const GridSpec& spec);

std::vector<double> chi(const Worldline& w, const QubitParams& q, const RegularizationParams& reg,
                        const GridSpec& spec);

/// Survival against the freely evolved |+> projector: (1 + e^chi) / 2.
double survival_dephasing(double chi_value);
std::vector<double> survival_dephasing(std::span<const double> chi_values);

}  // namespace qzeno
