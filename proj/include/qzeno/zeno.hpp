#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qzeno {

/// Effective decay rate Gamma(tau) = -ln s(tau) / tau against proper time.
struct DecayCurve {
  std::vector<double> tau;
  std::vector<double> gamma;
  std::string channel;
  std::string worldline;

  /// Throws ValidationError unless tau is strictly increasing and Gamma finite.
  void validate() const;
};

enum class Regime { zeno, anti_zeno };

std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view s);

struct RegimeSegment {
  double tau_start;
  double tau_end;
  Regime label;
};

struct RegimeSegmentation {
  std::vector<RegimeSegment> segments;
  std::vector<Regime> point_labels;  // one per curve point
};

/// Labels each grid point by the sign of the centered difference dGamma/dtau:
/// increasing Gamma is Zeno, decreasing is anti-Zeno. Slopes smaller than
/// slope_tol * max|Gamma| / (tau_max - tau_min) keep the previous label, and
/// runs of a single point are absorbed by their neighbours. Segment
/// boundaries sit at the interpolated zero of the slope when it changes sign.
/// Needs at least 8 points.
RegimeSegmentation segment_regimes(const DecayCurve& curve, double slope_tol = 1e-3);

/// Survival after n measurements at interval tau: s^n = exp(-Gamma n tau).
double repeated_measurement_survival(double s, int n);

struct OptimalInterval {
  double tau;
  double gamma;
};

/// Grid minimum of Gamma (earliest on ties) refined by the parabola through
/// its neighbours; boundary minima are returned as is.
OptimalInterval optimal_interval(const DecayCurve& curve);

}  // namespace qzeno
