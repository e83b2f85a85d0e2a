#pragma once

#include <complex>

#include "qzeno/wightman.hpp"

namespace qzeno {

/// Ohmic spectral density with exponential cutoff, J(w) = G w exp(-w / w_c).
struct OhmicParams {
  double G = 0.0;
  double omega_c = 1.0;

  void validate() const;
};

struct MappedParams {
  RegularizationParams regularization;
  double coupling;
};

/// eps = 1 / (2 omega_c), c = 2 pi sqrt(G): under this identification the
/// stationary c^2 W_eps(dtau) is the Fourier transform of J.
MappedParams map_params(const OhmicParams& p);

double spectral_density(const OhmicParams& p, double omega);

/// int_0^inf J(w) e^{-i w dtau} dw = G / (1/omega_c + i dtau)^2.
std::complex<double> bath_correlation(const OhmicParams& p, double dtau);

/// The same transform by adaptive quadrature over [0, 40 omega_c].
std::complex<double> bath_correlation_numeric(const OhmicParams& p, double dtau);

/// Closed form of the stationary dephasing exponent: -2 G ln(1 + omega_c^2 t^2).
double chi_stationary_analytic(const OhmicParams& p, double t);

/// Second-order survival of the sigma_x channel on the stationary worldline,
///
///   s(t) = 1 - int_0^inf J(w) 4 sin^2((w - 2 w0) t / 2) / (w - 2 w0)^2 dw,
///
/// by adaptive Gauss-Kronrod quadrature on [0, 40 omega_c].
double survival_sx_stationary_oracle(const OhmicParams& p, double omega0, double t);

}  // namespace qzeno
