#include "qzeno/dephasing.hpp"

#include <cmath>
#include <sstream>

#include "qzeno/errors.hpp"

namespace qzeno {

void QubitParams::validate() const {
  if (!std::isfinite(omega0) || !std::isfinite(delta))
    throw ValidationError("qubit: omega0 and delta must be finite");
  if (!(coupling >= 0.0) || !std::isfinite(coupling))
    throw ValidationError("qubit: coupling c must be >= 0");
}

DephasingResult solve_dephasing(const Worldline& w, const QubitParams& q,
                                const RegularizationParams& reg, const GridSpec& spec) {
  q.validate();
  if (q.delta != 0.0)
    throw ValidationError("exact dephasing solution requires delta = 0");
  spec.validate();

  const WightmanKernel kernel(w, reg);
  const CumulativeIntegral integral = cumulative_square_integral(kernel, spec);

  DephasingResult result;
  result.tau_grid = spec.t_grid;
  result.kernel_evals = integral.kernel_evals;
  const double c2 = q.coupling * q.coupling;
  for (std::size_t k = 0; k < integral.values.size(); ++k) {
    const std::complex<double> value = integral.values[k];
    if (std::abs(value.imag()) > 1e-10 * std::abs(value) + 1e-14) {
      std::ostringstream os;
      os.precision(17);
      os << "Wightman double integral is not real at tau = " << spec.t_grid[k] << ": " << value;
      throw ContractViolation("dephasing.real_integral", os.str());
    }
    const double chi_value = -2.0 * c2 * value.real();
    if (chi_value > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "dephasing exponent is positive at tau = " << spec.t_grid[k] << ": chi = " << chi_value;
      throw ContractViolation("dephasing.nonpositive_chi", os.str());
    }
    result.chi.push_back(std::min(chi_value, 0.0));
  }
  result.survival = survival_dephasing(result.chi);
  for (double x : result.chi) result.coherence_magnitude.push_back(std::exp(x));
  return result;
}

std::vector<double> chi(const Worldline& w, const QubitParams& q, const RegularizationParams& reg,
                        const GridSpec& spec) {
  return solve_dephasing(w, q, reg, spec).chi;
}

double survival_dephasing(double chi_value) {
  if (chi_value > 0.0 || std::isnan(chi_value)) {
    std::ostringstream os;
    os << "survival_dephasing requires chi <= 0, got " << chi_value;
    throw DomainError(os.str());
  }
  return 0.5 * (1.0 + std::exp(chi_value));
}

std::vector<double> survival_dephasing(std::span<const double> chi_values) {
  std::vector<double> s;
  s.reserve(chi_values.size());
  for (double x : chi_values) s.push_back(survival_dephasing(x));
  return s;
}

}  // namespace qzeno
