#include "qzeno/zeno.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qzeno/errors.hpp"

namespace qzeno {

void DecayCurve::validate() const {
  if (tau.empty() || tau.size() != gamma.size())
    throw ValidationError("decay curve: tau and gamma must be non-empty and of equal length");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!std::isfinite(gamma[i]) || !std::isfinite(tau[i]))
      throw ValidationError("decay curve: non-finite value at index " + std::to_string(i));
    if (i > 0 && !(tau[i] > tau[i - 1]))
      throw ValidationError("decay curve: tau not strictly increasing at index " + std::to_string(i));
  }
}

std::string_view to_string(Regime r) { return r == Regime::zeno ? "zeno" : "anti_zeno"; }

Regime regime_from_string(std::string_view s) {
  if (s == "zeno") return Regime::zeno;
  if (s == "anti_zeno") return Regime::anti_zeno;
  throw ValidationError("unknown regime label \"" + std::string(s) + "\"");
}

RegimeSegmentation segment_regimes(const DecayCurve& curve, double slope_tol) {
  curve.validate();
  const std::size_t n = curve.tau.size();
  if (n < 8)
    throw ValidationError("segment_regimes needs at least 8 points, got " + std::to_string(n));
  const auto& t = curve.tau;
  const auto& g = curve.gamma;

  std::vector<double> slope(n);
  slope[0] = (g[1] - g[0]) / (t[1] - t[0]);
  slope[n - 1] = (g[n - 1] - g[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = (g[i + 1] - g[i - 1]) / (t[i + 1] - t[i - 1]);

  double scale = 0.0;
  for (double v : g) scale = std::max(scale, std::abs(v));
  const double threshold = slope_tol * scale / (t[n - 1] - t[0]);

  std::vector<int> raw(n, 0);  // +1 zeno, -1 anti-zeno, 0 undecided
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(slope[i]) >= threshold && slope[i] != 0.0) raw[i] = slope[i] > 0.0 ? 1 : -1;
  int first = 1;
  for (int r : raw)
    if (r != 0) {
      first = r;
      break;
    }
  std::vector<int> label(n);
  int current = first;
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i] != 0) current = raw[i];
    label[i] = current;
  }

  // Absorb single-point runs until none remain.
  for (bool changed = true; changed;) {
    changed = false;
    std::size_t start = 0;
    while (start < n) {
      std::size_t end = start;
      while (end + 1 < n && label[end + 1] == label[start]) ++end;
      if (end == start && !(start == 0 && end == n - 1)) {
        label[start] = start > 0 ? label[start - 1] : label[start + 1];
        changed = true;
      }
      start = end + 1;
    }
  }

  RegimeSegmentation out;
  out.point_labels.reserve(n);
  for (int l : label) out.point_labels.push_back(l > 0 ? Regime::zeno : Regime::anti_zeno);

  double seg_start = t[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && label[i + 1] == label[i]) continue;
    double seg_end = t[n - 1];
    if (i + 1 < n) {
      const double s0 = slope[i];
      const double s1 = slope[i + 1];
      if ((s0 > 0.0 && s1 < 0.0) || (s0 < 0.0 && s1 > 0.0))
        seg_end = t[i] + (t[i + 1] - t[i]) * s0 / (s0 - s1);
      else
        seg_end = 0.5 * (t[i] + t[i + 1]);
    }
    out.segments.push_back({seg_start, seg_end, out.point_labels[i]});
    seg_start = seg_end;
  }
  return out;
}

double repeated_measurement_survival(double s, int n) {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "repeated_measurement_survival requires 0 < s <= 1, got " << s;
    throw DomainError(os.str());
  }
  if (n < 1) throw DomainError("repeated_measurement_survival requires n >= 1");
  return std::exp(n * std::log(s));
}

OptimalInterval optimal_interval(const DecayCurve& curve) {
  curve.validate();
  const auto& t = curve.tau;
  const auto& g = curve.gamma;
  const std::size_t i = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
  if (i == 0 || i + 1 == g.size()) return {t[i], g[i]};

  const double da = t[i] - t[i - 1];
  const double db = t[i] - t[i + 1];
  const double fa = g[i] - g[i - 1];
  const double fb = g[i] - g[i + 1];
  const double denom = da * fb - db * fa;
  if (denom == 0.0) return {t[i], g[i]};
  double x = t[i] - 0.5 * (da * da * fb - db * db * fa) / denom;
  x = std::clamp(x, t[i - 1], t[i + 1]);

  // Lagrange form of the same parabola.
  const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
  const double y = g[i - 1] * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) +
                   g[i] * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)) +
                   g[i + 1] * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  return {x, y};
}

}  // namespace qzeno
