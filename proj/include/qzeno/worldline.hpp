#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qzeno {

/// An event or tangent vector (t, x, y, z) in natural units (eV^-1).
struct FourVector {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr FourVector operator+(const FourVector& a, const FourVector& b) {
    return {a.t + b.t, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr FourVector operator-(const FourVector& a, const FourVector& b) {
    return {a.t - b.t, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr FourVector operator*(double s, const FourVector& a) {
    return {s * a.t, s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(const FourVector&, const FourVector&) = default;
};

/// Signature (+,-,-,-).
constexpr double minkowski_dot(const FourVector& a, const FourVector& b) {
  return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z;
}
constexpr double minkowski_square(const FourVector& a) { return minkowski_dot(a, a); }

/// Lorentz boost with velocity `beta` along +x applied to an event or tangent.
FourVector boost_x(const FourVector& v, double beta);

/// Monotone map between coordinate time t and proper time tau.
///
/// Analytic for the stationary (tau = t) and uniformly accelerated
/// (tau = asinh(a t) / a) worldlines. Otherwise a node table: tau is
/// integrated from dtau/dt with classical RK4 and interpolated with cubic
/// Hermite segments using the exact node slopes. Inverse lookups solve the
/// interpolant, so t(tau(t)) == t up to rounding.
class ProperTimeMap {
 public:
  using RateFunction = std::function<double(double)>;

  static ProperTimeMap identity();
  static ProperTimeMap hyperbolic(double acceleration);
  /// Integrates `rate` (= sqrt(1 - |v|^2)) over the strictly increasing node
  /// times `nodes`. Throws ValidationError naming the first node where the
  /// rate is not in (0, 1].
  static ProperTimeMap integrate(RateFunction rate, std::vector<double> nodes);

  double tau(double t) const;
  double t(double tau) const;
  double rate(double t) const;

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double tau_max() const { return tau_max_; }
  bool is_analytic() const { return kind_ != Kind::table; }
  std::size_t node_count() const { return nodes_t_.size(); }

 private:
  enum class Kind { identity, hyperbolic, table };

  ProperTimeMap() = default;
  std::size_t segment_for_t(double t) const;
  double hermite(std::size_t k, double t) const;
  double hermite_slope(std::size_t k, double t) const;

  Kind kind_ = Kind::identity;
  double acceleration_ = 0.0;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
  double tau_max_ = 0.0;
  RateFunction rate_;
  std::vector<double> nodes_t_;
  std::vector<double> nodes_tau_;
  std::vector<double> nodes_rate_;
};

/// Not-a-knot cubic spline through (t_i, y_i).
class CubicSpline {
 public:
  CubicSpline(std::span<const double> t, std::span<const double> y);

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

 private:
  std::size_t segment(double t) const;

  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

enum class WorldlineFamily { stationary, uniform_acceleration, oscillating, circular, sampled };

std::string to_string(WorldlineFamily family);

/// Position and 4-velocity at one proper time.
struct WorldlinePoint {
  FourVector position;
  FourVector velocity;
};

/// Coordinate difference X(tau1) - X(tau2) and both 4-velocities, expressed in
/// a common inertial frame chosen for numerical conditioning. Only Lorentz
/// invariant combinations of these should be used.
struct Separation {
  FourVector dx;
  FourVector u1;
  FourVector u2;
};

/// A timelike trajectory through Minkowski spacetime parameterized by proper
/// time, tau >= 0. Immutable; copies share the underlying tables.
class Worldline {
 public:
  static constexpr double kDefaultHorizon = 16.0;
  static constexpr std::size_t kDefaultNodes = 4096;
  static constexpr std::size_t kNodesPerPeriod = 1024;

  static Worldline stationary();
  /// t = sinh(a tau)/a, x = cosh(a tau)/a.
  static Worldline uniform_acceleration(double acceleration);
  /// x = b sin((v/b) t). `proper_horizon` bounds the proper time queried.
  static Worldline oscillating(double amplitude, double peak_speed,
                               double proper_horizon = kDefaultHorizon);
  /// x = b sin((v/b) t), y = b cos((v/b) t).
  static Worldline circular(double radius, double speed,
                            double proper_horizon = kDefaultHorizon);
  /// Events with strictly increasing t, interpolated by cubic splines. Proper
  /// time is measured from the first event.
  static Worldline sampled(std::vector<FourVector> events);

  WorldlineFamily family() const { return family_; }
  std::string describe() const;

  FourVector position(double tau) const;
  FourVector four_velocity(double tau) const;
  WorldlinePoint point(double tau) const;
  Separation separation(double tau1, double tau2) const;

  /// Coordinate-time parameterization, t in [t_min, t_max] of the map.
  FourVector event_at(double t) const;
  std::array<double, 3> coordinate_velocity(double t) const;
  std::array<double, 3> coordinate_acceleration(double t) const;

  /// Largest proper acceleration |du/dtau| along the worldline (0 when
  /// inertial). Sets the shortest time scale of the Wightman kernel besides
  /// the regularization.
  double max_proper_acceleration() const { return max_acceleration_; }

  /// True when W(tau1, tau2) depends on tau1 - tau2 only.
  bool is_stationary_orbit() const {
    return family_ == WorldlineFamily::stationary ||
           family_ == WorldlineFamily::uniform_acceleration ||
           family_ == WorldlineFamily::circular;
  }

  /// Largest valid proper time; infinity for stationary and uniform acceleration.
  double tau_max() const;
  const ProperTimeMap& proper_time_map() const { return *map_; }

  /// Family parameters: a; (b, v); (b, v); empty otherwise.
  const std::vector<double>& parameters() const { return params_; }

 private:
  struct Table;

  Worldline() = default;
  void check_range(double tau) const;
  WorldlinePoint point_at_coordinate_time(double t) const;
  double scan_proper_acceleration() const;

  WorldlineFamily family_ = WorldlineFamily::stationary;
  std::vector<double> params_;
  double omega_ = 0.0;  // v / b for oscillating and circular
  double max_acceleration_ = 0.0;
  std::shared_ptr<const Table> table_;
  std::shared_ptr<const ProperTimeMap> map_;
};

/// Integrates dtau/dt = sqrt(1 - |v(t)|^2) of `w` on [t_min, t_min + t_max]
/// with `n_nodes` uniformly spaced nodes. Stationary and uniformly accelerated
/// worldlines get their exact analytic maps.
ProperTimeMap build_proper_time_map(const Worldline& w, double t_max, std::size_t n_nodes);

/// Reads a "t,x,y,z" CSV. Lines starting with '#' are comments.
Worldline load_sampled_worldline(std::istream& source);

}  // namespace qzeno
