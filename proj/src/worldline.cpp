#include "qzeno/worldline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string_view>

#include "qzeno/errors.hpp"

namespace qzeno {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

FourVector boost_x(const FourVector& v, double beta) {
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  return {gamma * (v.t - beta * v.x), gamma * (v.x - beta * v.t), v.y, v.z};
}

// ---------------------------------------------------------------------------
// ProperTimeMap

ProperTimeMap ProperTimeMap::identity() {
  ProperTimeMap m;
  m.kind_ = Kind::identity;
  m.t_max_ = std::numeric_limits<double>::infinity();
  m.tau_max_ = std::numeric_limits<double>::infinity();
  return m;
}

ProperTimeMap ProperTimeMap::hyperbolic(double acceleration) {
  if (!(acceleration > 0.0) || !std::isfinite(acceleration))
    throw ValidationError("uniform acceleration requires a > 0, got " + format_double(acceleration));
  ProperTimeMap m;
  m.kind_ = Kind::hyperbolic;
  m.acceleration_ = acceleration;
  m.t_max_ = std::numeric_limits<double>::infinity();
  m.tau_max_ = std::numeric_limits<double>::infinity();
  return m;
}

ProperTimeMap ProperTimeMap::integrate(RateFunction rate, std::vector<double> nodes) {
  if (nodes.size() < 2) throw ValidationError("proper time map needs at least two nodes");
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k] > nodes[k - 1]))
      throw ValidationError("proper time map nodes must be strictly increasing at node " +
                            std::to_string(k));
  }
  auto checked = [&](double t) {
    const double r = rate(t);
    if (!(r > 0.0 && r <= 1.0))
      throw ValidationError("worldline is not timelike at t = " + format_double(t) +
                            " (dtau/dt = " + format_double(r) + ")");
    return r;
  };

  ProperTimeMap m;
  m.kind_ = Kind::table;
  m.nodes_rate_.resize(nodes.size());
  m.nodes_tau_.resize(nodes.size());
  m.nodes_rate_[0] = checked(nodes[0]);
  m.nodes_tau_[0] = 0.0;
  // The right-hand side depends on t only, so each RK4 step reduces to
  // Simpson's rule on [t_k, t_k+1].
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double h = nodes[k + 1] - nodes[k];
    const double mid = checked(nodes[k] + 0.5 * h);
    m.nodes_rate_[k + 1] = checked(nodes[k + 1]);
    m.nodes_tau_[k + 1] =
        m.nodes_tau_[k] + h / 6.0 * (m.nodes_rate_[k] + 4.0 * mid + m.nodes_rate_[k + 1]);
  }
  m.t_min_ = nodes.front();
  m.t_max_ = nodes.back();
  m.tau_max_ = m.nodes_tau_.back();
  m.nodes_t_ = std::move(nodes);
  m.rate_ = std::move(rate);
  return m;
}

std::size_t ProperTimeMap::segment_for_t(double t) const {
  auto it = std::upper_bound(nodes_t_.begin(), nodes_t_.end(), t);
  std::size_t k = it == nodes_t_.begin() ? 0 : static_cast<std::size_t>(it - nodes_t_.begin()) - 1;
  return std::min(k, nodes_t_.size() - 2);
}

double ProperTimeMap::hermite(std::size_t k, double t) const {
  const double h = nodes_t_[k + 1] - nodes_t_[k];
  const double s = (t - nodes_t_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * nodes_tau_[k] + (s3 - 2 * s2 + s) * h * nodes_rate_[k] +
         (-2 * s3 + 3 * s2) * nodes_tau_[k + 1] + (s3 - s2) * h * nodes_rate_[k + 1];
}

double ProperTimeMap::hermite_slope(std::size_t k, double t) const {
  const double h = nodes_t_[k + 1] - nodes_t_[k];
  const double s = (t - nodes_t_[k]) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * (nodes_tau_[k] - nodes_tau_[k + 1])) / h +
         (3 * s2 - 4 * s + 1) * nodes_rate_[k] + (3 * s2 - 2 * s) * nodes_rate_[k + 1];
}

double ProperTimeMap::tau(double t) const {
  switch (kind_) {
    case Kind::identity:
      return t;
    case Kind::hyperbolic:
      return std::asinh(acceleration_ * t) / acceleration_;
    case Kind::table:
      break;
  }
  if (t < t_min_ || t > t_max_)
    throw RangeError("coordinate time " + format_double(t) + " outside [" + format_double(t_min_) +
                     ", " + format_double(t_max_) + "]");
  return hermite(segment_for_t(t), t);
}

double ProperTimeMap::t(double tau) const {
  switch (kind_) {
    case Kind::identity:
      return tau;
    case Kind::hyperbolic:
      return std::sinh(acceleration_ * tau) / acceleration_;
    case Kind::table:
      break;
  }
  if (tau < 0.0 || tau > tau_max_)
    throw RangeError("proper time " + format_double(tau) + " outside [0, " + format_double(tau_max_) +
                     "]");
  auto it = std::upper_bound(nodes_tau_.begin(), nodes_tau_.end(), tau);
  std::size_t k = it == nodes_tau_.begin() ? 0 : static_cast<std::size_t>(it - nodes_tau_.begin()) - 1;
  k = std::min(k, nodes_t_.size() - 2);

  double lo = nodes_t_[k];
  double hi = nodes_t_[k + 1];
  const double span = nodes_tau_[k + 1] - nodes_tau_[k];
  double x = lo + (hi - lo) * (tau - nodes_tau_[k]) / span;
  for (int iter = 0; iter < 60; ++iter) {
    const double f = hermite(k, x) - tau;
    if (f == 0.0) break;
    if (f > 0.0) hi = x; else lo = x;
    const double slope = hermite_slope(k, x);
    double next = x - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double ProperTimeMap::rate(double t) const {
  switch (kind_) {
    case Kind::identity:
      return 1.0;
    case Kind::hyperbolic:
      return 1.0 / std::sqrt(1.0 + acceleration_ * acceleration_ * t * t);
    case Kind::table:
      break;
  }
  if (t < t_min_ || t > t_max_)
    throw RangeError("coordinate time " + format_double(t) + " outside the proper time map");
  return rate_(t);
}

// ---------------------------------------------------------------------------
// CubicSpline

CubicSpline::CubicSpline(std::span<const double> t, std::span<const double> y)
    : t_(t.begin(), t.end()), y_(y.begin(), y.end()), m_(t.size(), 0.0) {
  const std::size_t n = t_.size();
  if (n < 4 || y_.size() != n) throw ValidationError("cubic spline needs at least 4 knots");

  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = t_[i + 1] - t_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  // Unknowns M_1..M_{n-2}; not-a-knot eliminates M_0 and M_{n-1}.
  const std::size_t m = n - 2;
  std::vector<double> sub(m, 0.0), diag(m, 0.0), sup(m, 0.0), rhs(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = r + 1;
    sub[r] = h[i - 1];
    diag[r] = 2.0 * (h[i - 1] + h[i]);
    sup[r] = h[i];
    rhs[r] = 6.0 * (d[i] - d[i - 1]);
  }
  // M_0 = ((h0 + h1) M_1 - h0 M_2) / h1
  diag[0] += h[0] * (h[0] + h[1]) / h[1];
  if (m > 1) sup[0] -= h[0] * h[0] / h[1];
  // M_{n-1} = ((h_{n-2} + h_{n-3}) M_{n-2} - h_{n-2} M_{n-3}) / h_{n-3}
  const double hl = h[n - 2];
  const double hp = h[n - 3];
  diag[m - 1] += hl * (hl + hp) / hp;
  if (m > 1) sub[m - 1] -= hl * hl / hp;

  // Thomas algorithm.
  for (std::size_t r = 1; r < m; ++r) {
    const double w = sub[r] / diag[r - 1];
    diag[r] -= w * sup[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  std::vector<double> sol(m);
  sol[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t r = m - 1; r-- > 0;) sol[r] = (rhs[r] - sup[r] * sol[r + 1]) / diag[r];

  for (std::size_t r = 0; r < m; ++r) m_[r + 1] = sol[r];
  m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
  m_[n - 1] = ((hl + hp) * m_[n - 2] - hl * m_[n - 3]) / hp;
}

std::size_t CubicSpline::segment(double t) const {
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t k = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(k, t_.size() - 2);
}

double CubicSpline::value(double t) const {
  const std::size_t i = segment(t);
  const double h = t_[i + 1] - t_[i];
  const double a = t_[i + 1] - t;
  const double b = t - t_[i];
  return m_[i] * a * a * a / (6 * h) + m_[i + 1] * b * b * b / (6 * h) +
         (y_[i] / h - m_[i] * h / 6) * a + (y_[i + 1] / h - m_[i + 1] * h / 6) * b;
}

double CubicSpline::derivative(double t) const {
  const std::size_t i = segment(t);
  const double h = t_[i + 1] - t_[i];
  const double a = t_[i + 1] - t;
  const double b = t - t_[i];
  return -m_[i] * a * a / (2 * h) + m_[i + 1] * b * b / (2 * h) + (y_[i + 1] - y_[i]) / h -
         h * (m_[i + 1] - m_[i]) / 6;
}

double CubicSpline::second_derivative(double t) const {
  const std::size_t i = segment(t);
  const double h = t_[i + 1] - t_[i];
  return (m_[i] * (t_[i + 1] - t) + m_[i + 1] * (t - t_[i])) / h;
}

// ---------------------------------------------------------------------------
// Worldline

struct Worldline::Table {
  std::vector<FourVector> events;
  CubicSpline x;
  CubicSpline y;
  CubicSpline z;
};

std::string to_string(WorldlineFamily family) {
  switch (family) {
    case WorldlineFamily::stationary:
      return "stationary";
    case WorldlineFamily::uniform_acceleration:
      return "uniform_acceleration";
    case WorldlineFamily::oscillating:
      return "oscillating";
    case WorldlineFamily::circular:
      return "circular";
    case WorldlineFamily::sampled:
      return "sampled";
  }
  return "unknown";
}

Worldline Worldline::stationary() {
  Worldline w;
  w.family_ = WorldlineFamily::stationary;
  w.map_ = std::make_shared<const ProperTimeMap>(ProperTimeMap::identity());
  return w;
}

Worldline Worldline::uniform_acceleration(double acceleration) {
  Worldline w;
  w.family_ = WorldlineFamily::uniform_acceleration;
  w.params_ = {acceleration};
  w.max_acceleration_ = acceleration;
  w.map_ = std::make_shared<const ProperTimeMap>(ProperTimeMap::hyperbolic(acceleration));
  return w;
}

namespace {

void check_periodic_params(double b, double v, double horizon, const char* what) {
  if (!(b > 0.0) || !std::isfinite(b))
    throw ValidationError(std::string(what) + " worldline requires b > 0, got " + format_double(b));
  if (!(v > 0.0 && v < 1.0))
    throw ValidationError(std::string(what) + " worldline requires 0 < v < 1, got " +
                          format_double(v));
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ValidationError(std::string(what) + " worldline requires a positive proper-time horizon");
}

std::size_t nodes_for(double t_max, double period) {
  const double per = std::ceil(t_max / period * static_cast<double>(Worldline::kNodesPerPeriod));
  return std::max(Worldline::kDefaultNodes, static_cast<std::size_t>(per) + 1);
}

}  // namespace

Worldline Worldline::oscillating(double amplitude, double peak_speed, double proper_horizon) {
  check_periodic_params(amplitude, peak_speed, proper_horizon, "oscillating");
  Worldline w;
  w.family_ = WorldlineFamily::oscillating;
  w.params_ = {amplitude, peak_speed};
  w.omega_ = peak_speed / amplitude;
  const double period = 2.0 * std::numbers::pi / w.omega_;
  // Mean of dtau/dt over a period is 2 E(v) / pi.
  const double mean_rate = 2.0 * std::comp_ellint_2(peak_speed) / std::numbers::pi;
  const double t_max = proper_horizon / mean_rate + period;
  w.map_ = std::make_shared<const ProperTimeMap>(
      build_proper_time_map(w, t_max, nodes_for(t_max, period)));
  w.max_acceleration_ = w.scan_proper_acceleration();
  return w;
}

Worldline Worldline::circular(double radius, double speed, double proper_horizon) {
  check_periodic_params(radius, speed, proper_horizon, "circular");
  Worldline w;
  w.family_ = WorldlineFamily::circular;
  w.params_ = {radius, speed};
  w.omega_ = speed / radius;
  const double t_max = proper_horizon / std::sqrt(1.0 - speed * speed) * 1.001;
  w.map_ = std::make_shared<const ProperTimeMap>(
      build_proper_time_map(w, t_max, kDefaultNodes));
  w.max_acceleration_ = speed * speed / (radius * (1.0 - speed * speed));
  return w;
}

Worldline Worldline::sampled(std::vector<FourVector> events) {
  if (events.size() < 4)
    throw ValidationError("sampled worldline needs at least 4 rows, got " +
                          std::to_string(events.size()));
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!std::isfinite(e.t) || !std::isfinite(e.x) || !std::isfinite(e.y) || !std::isfinite(e.z))
      throw ValidationError("row " + std::to_string(i + 1) + ": non-finite value");
    if (i > 0 && !(e.t > events[i - 1].t))
      throw ValidationError("row " + std::to_string(i + 1) + ": t is not strictly increasing");
  }
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const FourVector d = events[i + 1] - events[i];
    const double speed2 = (d.x * d.x + d.y * d.y + d.z * d.z) / (d.t * d.t);
    if (!(speed2 < 1.0))
      throw ValidationError("segment " + std::to_string(i + 1) + " (rows " + std::to_string(i + 1) +
                            "-" + std::to_string(i + 2) + ") is not timelike: speed " +
                            format_double(std::sqrt(speed2)));
  }

  std::vector<double> t(events.size()), x(events.size()), y(events.size()), z(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    t[i] = events[i].t;
    x[i] = events[i].x;
    y[i] = events[i].y;
    z[i] = events[i].z;
  }
  auto table = std::make_shared<Table>(Table{std::move(events), CubicSpline(t, x), CubicSpline(t, y),
                                             CubicSpline(t, z)});

  Worldline w;
  w.family_ = WorldlineFamily::sampled;
  w.table_ = table;

  // Refine every knot interval uniformly so node times include all knots.
  const std::size_t intervals = t.size() - 1;
  const std::size_t steps = std::max<std::size_t>(
      1, (kDefaultNodes + intervals - 1) / intervals);
  std::vector<double> nodes;
  nodes.reserve(intervals * steps + 1);
  for (std::size_t i = 0; i < intervals; ++i) {
    for (std::size_t s = 0; s < steps; ++s)
      nodes.push_back(t[i] + (t[i + 1] - t[i]) * static_cast<double>(s) / static_cast<double>(steps));
  }
  nodes.push_back(t.back());
  std::shared_ptr<const Table> tab = table;
  w.map_ = std::make_shared<const ProperTimeMap>(ProperTimeMap::integrate(
      [tab](double tc) {
        const double vx = tab->x.derivative(tc);
        const double vy = tab->y.derivative(tc);
        const double vz = tab->z.derivative(tc);
        return std::sqrt(1.0 - (vx * vx + vy * vy + vz * vz));
      },
      std::move(nodes)));
  w.max_acceleration_ = w.scan_proper_acceleration();
  return w;
}

std::string Worldline::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << to_string(family_);
  switch (family_) {
    case WorldlineFamily::uniform_acceleration:
      os << "(a=" << params_[0] << ")";
      break;
    case WorldlineFamily::oscillating:
    case WorldlineFamily::circular:
      os << "(b=" << params_[0] << ",v=" << params_[1] << ",omega=" << omega_ << ")";
      break;
    case WorldlineFamily::sampled:
      os << "(rows=" << table_->events.size() << ")";
      break;
    case WorldlineFamily::stationary:
      break;
  }
  return os.str();
}

double Worldline::tau_max() const { return map_->tau_max(); }

void Worldline::check_range(double tau) const {
  if (!(tau >= 0.0) || tau > map_->tau_max())
    throw RangeError("proper time " + format_double(tau) + " outside [0, " +
                     format_double(map_->tau_max()) + "] for " + describe());
}

FourVector Worldline::event_at(double t) const {
  switch (family_) {
    case WorldlineFamily::stationary:
      return {t, 0.0, 0.0, 0.0};
    case WorldlineFamily::uniform_acceleration: {
      const double a = params_[0];
      return {t, std::sqrt(1.0 / (a * a) + t * t), 0.0, 0.0};
    }
    case WorldlineFamily::oscillating:
      return {t, params_[0] * std::sin(omega_ * t), 0.0, 0.0};
    case WorldlineFamily::circular:
      return {t, params_[0] * std::sin(omega_ * t), params_[0] * std::cos(omega_ * t), 0.0};
    case WorldlineFamily::sampled:
      return {t, table_->x.value(t), table_->y.value(t), table_->z.value(t)};
  }
  return {};
}

std::array<double, 3> Worldline::coordinate_velocity(double t) const {
  switch (family_) {
    case WorldlineFamily::stationary:
      return {0.0, 0.0, 0.0};
    case WorldlineFamily::uniform_acceleration: {
      const double a = params_[0];
      return {a * t / std::sqrt(1.0 + a * a * t * t), 0.0, 0.0};
    }
    case WorldlineFamily::oscillating:
      return {params_[1] * std::cos(omega_ * t), 0.0, 0.0};
    case WorldlineFamily::circular:
      return {params_[1] * std::cos(omega_ * t), -params_[1] * std::sin(omega_ * t), 0.0};
    case WorldlineFamily::sampled:
      return {table_->x.derivative(t), table_->y.derivative(t), table_->z.derivative(t)};
  }
  return {};
}

std::array<double, 3> Worldline::coordinate_acceleration(double t) const {
  switch (family_) {
    case WorldlineFamily::stationary:
      return {0.0, 0.0, 0.0};
    case WorldlineFamily::uniform_acceleration: {
      const double a = params_[0];
      return {a / std::pow(1.0 + a * a * t * t, 1.5), 0.0, 0.0};
    }
    case WorldlineFamily::oscillating:
      return {-params_[1] * omega_ * std::sin(omega_ * t), 0.0, 0.0};
    case WorldlineFamily::circular:
      return {-params_[1] * omega_ * std::sin(omega_ * t), -params_[1] * omega_ * std::cos(omega_ * t),
              0.0};
    case WorldlineFamily::sampled:
      return {table_->x.second_derivative(t), table_->y.second_derivative(t),
              table_->z.second_derivative(t)};
  }
  return {};
}

double Worldline::scan_proper_acceleration() const {
  // alpha^2 = gamma^4 (|a|^2 + gamma^2 (v.a)^2), sampled on the map's range
  // at the node density of the map.
  const ProperTimeMap& map = *map_;
  const std::size_t n = std::max<std::size_t>(map.node_count(), 2) * 4;
  double best = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = map.t_min() + (map.t_max() - map.t_min()) * static_cast<double>(k) /
                                       static_cast<double>(n - 1);
    const auto v = coordinate_velocity(t);
    const auto a = coordinate_acceleration(t);
    const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double va = v[0] * a[0] + v[1] * a[1] + v[2] * a[2];
    const double a2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    const double g2 = 1.0 / (1.0 - v2);
    best = std::max(best, g2 * std::sqrt(a2 + g2 * va * va));
  }
  return best;
}

WorldlinePoint Worldline::point_at_coordinate_time(double t) const {
  const auto v = coordinate_velocity(t);
  const double gamma = 1.0 / std::sqrt(1.0 - (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
  return {event_at(t), {gamma, gamma * v[0], gamma * v[1], gamma * v[2]}};
}

WorldlinePoint Worldline::point(double tau) const {
  check_range(tau);
  switch (family_) {
    case WorldlineFamily::stationary:
      return {{tau, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}};
    case WorldlineFamily::uniform_acceleration: {
      const double a = params_[0];
      const double ch = std::cosh(a * tau);
      const double sh = std::sinh(a * tau);
      return {{sh / a, ch / a, 0.0, 0.0}, {ch, sh, 0.0, 0.0}};
    }
    default:
      return point_at_coordinate_time(map_->t(tau));
  }
}

FourVector Worldline::position(double tau) const { return point(tau).position; }

FourVector Worldline::four_velocity(double tau) const { return point(tau).velocity; }

Separation Worldline::separation(double tau1, double tau2) const {
  switch (family_) {
    case WorldlineFamily::stationary:
      check_range(tau1);
      check_range(tau2);
      return {{tau1 - tau2, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}};
    case WorldlineFamily::uniform_acceleration: {
      // Boost to the frame comoving at the midpoint; the hyperbola maps to
      // itself with tau shifted, which keeps cosh/sinh arguments small.
      check_range(tau1);
      check_range(tau2);
      const double a = params_[0];
      const double half = 0.5 * (tau1 - tau2);
      const double ch = std::cosh(a * half);
      const double sh = std::sinh(a * half);
      return {{2.0 * sh / a, 0.0, 0.0, 0.0}, {ch, sh, 0.0, 0.0}, {ch, -sh, 0.0, 0.0}};
    }
    default: {
      const WorldlinePoint p1 = point(tau1);
      const WorldlinePoint p2 = point(tau2);
      return {p1.position - p2.position, p1.velocity, p2.velocity};
    }
  }
}

ProperTimeMap build_proper_time_map(const Worldline& w, double t_max, std::size_t n_nodes) {
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw ValidationError("proper time map requires t_max > 0, got " + format_double(t_max));
  if (n_nodes < 16)
    throw ValidationError("proper time map requires at least 16 nodes, got " +
                          std::to_string(n_nodes));
  switch (w.family()) {
    case WorldlineFamily::stationary:
      return ProperTimeMap::identity();
    case WorldlineFamily::uniform_acceleration:
      return ProperTimeMap::hyperbolic(w.parameters()[0]);
    default:
      break;
  }

  double t0 = 0.0;
  if (w.family() == WorldlineFamily::sampled) t0 = w.proper_time_map().t_min();
  std::vector<double> nodes(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k)
    nodes[k] = t0 + t_max * static_cast<double>(k) / static_cast<double>(n_nodes - 1);
  if (w.family() == WorldlineFamily::sampled && nodes.back() > w.proper_time_map().t_max())
    throw RangeError("t_max " + format_double(t_max) + " exceeds the sampled table");

  if (w.family() == WorldlineFamily::oscillating) {
    const double v = w.parameters()[1];
    const double omega = v / w.parameters()[0];
    return ProperTimeMap::integrate(
        [v, omega](double t) {
          const double c = std::cos(omega * t);
          return std::sqrt(1.0 - v * v * c * c);
        },
        std::move(nodes));
  }
  // Circular and sampled: generic |v(t)| from the coordinate velocity.
  return ProperTimeMap::integrate(
      [w](double t) {
        const auto v = w.coordinate_velocity(t);
        return std::sqrt(1.0 - (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
      },
      std::move(nodes));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Worldline load_sampled_worldline(std::istream& source) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<FourVector> events;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : text)
        if (c != ' ' && c != '\t') compact.push_back(c);
      if (compact != "t,x,y,z")
        throw ValidationError("line " + std::to_string(line_no) +
                              ": expected header \"t,x,y,z\"");
      header_seen = true;
      continue;
    }
    const std::size_t row = events.size() + 1;
    std::array<double, 4> values{};
    std::size_t field = 0;
    std::string_view rest = text;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      if (field >= 4)
        throw ValidationError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                              "): expected 4 fields");
      const char* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, values[field]);
      if (ec != std::errc() || ptr != end || cell.empty())
        throw ValidationError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                              "): malformed number \"" + std::string(cell) + "\"");
      ++field;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (field != 4)
      throw ValidationError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                            "): expected 4 fields");
    events.push_back({values[0], values[1], values[2], values[3]});
  }
  if (!header_seen) throw ValidationError("missing header \"t,x,y,z\"");
  return Worldline::sampled(std::move(events));
}

}  // namespace qzeno
