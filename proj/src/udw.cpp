#include "qzeno/udw.hpp"

#include <cmath>
#include <sstream>

#include "qzeno/errors.hpp"

namespace qzeno {

using Complex = std::complex<double>;

Matrix2 pauli(CouplingOperator op) {
  Matrix2 m;
  if (op == CouplingOperator::sigma_x)
    m << 0, 1, 1, 0;
  else
    m << 1, 0, 0, -1;
  return m;
}

ChannelSpec ChannelSpec::sigma_x() {
  ChannelSpec ch;
  ch.coupling = CouplingOperator::sigma_x;
  ch.initial_state << 1, 0, 0, 0;
  return ch;
}

ChannelSpec ChannelSpec::sigma_z() {
  ChannelSpec ch;
  ch.coupling = CouplingOperator::sigma_z;
  ch.initial_state << 0.5, 0.5, 0.5, 0.5;
  return ch;
}

void ChannelSpec::validate() const {
  const Matrix2& r = initial_state;
  if (!r.allFinite()) throw ValidationError("initial state has non-finite entries");
  if ((r - r.adjoint()).norm() > 1e-12) throw ValidationError("initial state is not Hermitian");
  if (std::abs(r.trace() - Complex(1.0)) > 1e-12)
    throw ValidationError("initial state does not have unit trace");
  const Eigen::SelfAdjointEigenSolver<Matrix2> eig(r);
  if (eig.eigenvalues().minCoeff() < -1e-12)
    throw ValidationError("initial state is not positive semidefinite");
  if (std::abs((r * r).trace().real() - 1.0) > 1e-10)
    throw ValidationError("initial state is not pure; the orthogonal projector is undefined");
}

Matrix2 ChannelSpec::orthogonal_projector() const { return Matrix2::Identity() - initial_state; }

Matrix2 interaction_picture_coupling(const QubitParams& q, const ChannelSpec& ch, double tau) {
  const double norm = std::hypot(q.omega0, q.delta);
  Matrix2 u = Matrix2::Identity();  // e^{-i H tau}
  if (norm > 0.0) {
    Matrix2 h;
    h << q.omega0, q.delta, q.delta, -q.omega0;
    u = std::cos(norm * tau) * Matrix2::Identity() - Complex(0.0, std::sin(norm * tau) / norm) * h;
  }
  return q.coupling * (u.adjoint() * pauli(ch.coupling) * u);
}

namespace {

Complex trace_factor_from(const Matrix2& f1, const Matrix2& f2, const Matrix2& rho0,
                          const Matrix2& projector) {
  const Matrix2 a = f2 * rho0;
  return (projector * (a * f1 - f1 * a)).trace();
}

}  // namespace

Complex trace_factor(const QubitParams& q, const ChannelSpec& ch, double tau1, double tau2) {
  return trace_factor_from(interaction_picture_coupling(q, ch, tau1),
                           interaction_picture_coupling(q, ch, tau2), ch.initial_state,
                           ch.orthogonal_projector());
}

PerturbativeKernel::PerturbativeKernel(Worldline worldline, QubitParams qubit, ChannelSpec channel,
                                       RegularizationParams reg)
    : wightman_(std::move(worldline), reg),
      qubit_(qubit),
      channel_(std::move(channel)),
      projector_(channel_.orthogonal_projector()) {}

void PerturbativeKernel::evaluate_block(std::span<const double> tau1, std::span<const double> tau2,
                                        std::span<Complex> out) const {
  wightman_.evaluate_block(tau1, tau2, out);
  std::vector<Matrix2> f1(tau1.size());
  std::vector<Matrix2> f2(tau2.size());
  for (std::size_t i = 0; i < tau1.size(); ++i)
    f1[i] = interaction_picture_coupling(qubit_, channel_, tau1[i]);
  for (std::size_t j = 0; j < tau2.size(); ++j)
    f2[j] = interaction_picture_coupling(qubit_, channel_, tau2[j]);
  for (std::size_t i = 0; i < tau1.size(); ++i)
    for (std::size_t j = 0; j < tau2.size(); ++j)
      out[i * tau2.size() + j] *= trace_factor_from(f1[i], f2[j], channel_.initial_state, projector_);
}

PerturbativeResult survival_perturbative(const Worldline& w, const QubitParams& q,
                                         const ChannelSpec& ch, const RegularizationParams& reg,
                                         const GridSpec& spec, double validity_threshold) {
  q.validate();
  ch.validate();
  spec.validate();
  const PerturbativeKernel kernel(w, q, ch, reg);
  const CumulativeIntegral integral = cumulative_square_integral(kernel, spec);

  PerturbativeResult result;
  result.tau_grid = spec.t_grid;
  result.kernel_evals = integral.kernel_evals;
  for (std::size_t k = 0; k < integral.values.size(); ++k) {
    const Complex value = integral.values[k];
    if (std::abs(value.imag()) > 1e-10 * std::abs(value) + 1e-14) {
      std::ostringstream os;
      os.precision(17);
      os << "perturbative double integral is not real at tau = " << spec.t_grid[k] << ": " << value;
      throw ContractViolation("udw.real_integral", os.str());
    }
    const double s = 1.0 - value.real();
    result.survival.push_back(s);
    result.valid.push_back(1.0 - s <= validity_threshold);
  }
  return result;
}

DecayCurve decay_rate(std::span<const double> tau_grid, std::span<const double> survival) {
  if (tau_grid.size() != survival.size())
    throw ValidationError("decay_rate: tau and survival lengths differ");
  DecayCurve curve;
  curve.tau.assign(tau_grid.begin(), tau_grid.end());
  curve.gamma.reserve(survival.size());
  for (std::size_t k = 0; k < survival.size(); ++k) {
    if (!(tau_grid[k] > 0.0)) {
      std::ostringstream os;
      os << "decay_rate requires tau > 0, got " << tau_grid[k];
      throw DomainError(os.str());
    }
    if (!(survival[k] > 0.0)) {
      std::ostringstream os;
      os << "decay_rate requires s > 0, got s = " << survival[k] << " at tau = " << tau_grid[k]
         << " (perturbation theory has broken down)";
      throw DomainError(os.str());
    }
    curve.gamma.push_back(-std::log(survival[k]) / tau_grid[k]);
  }
  return curve;
}

}  // namespace qzeno
