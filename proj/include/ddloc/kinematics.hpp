#pragma once

#include <numbers>

namespace ddloc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi]. Throws std::domain_error on NaN/Inf.
double wrap_angle(double theta);

/// Robot configuration in the global frame. Heading is kept in (-pi, pi].
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double theta);

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }

  bool operator==(const Pose&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

/// Wheel radius R and wheel separation L, both in meters.
class RobotGeometry {
 public:
  RobotGeometry(double wheel_radius, double track_width);

  double wheel_radius() const { return wheel_radius_; }
  double track_width() const { return track_width_; }

  /// 10 cm wheel diameter, 60 cm between drive wheels.
  static RobotGeometry reference_robot() { return RobotGeometry(0.05, 0.60); }

 private:
  double wheel_radius_;
  double track_width_;
};

struct WheelAngularSpeeds {
  double omega_r = 0.0;  // rad/s
  double omega_l = 0.0;  // rad/s
};

/// Linear speed of each wheel's rim over the ground, m/s.
struct WheelRimSpeeds {
  double v_r = 0.0;
  double v_l = 0.0;
};

struct BodyVelocity {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

struct PoseRate {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

struct WheelIncrements {
  double ds_l = 0.0;
  double ds_r = 0.0;
};

struct Displacement {
  double ds_l = 0.0;
  double ds_r = 0.0;
  double ds = 0.0;      // travel of the axle midpoint
  double dtheta = 0.0;  // heading change
};

WheelRimSpeeds to_rim_speeds(const WheelAngularSpeeds& w, const RobotGeometry& geom);
WheelAngularSpeeds to_angular_speeds(const WheelRimSpeeds& v, const RobotGeometry& geom);

// The printed kinematic matrix has +1/L in both entries of its second row.
// That contradicts the incremental heading relation dtheta = (ds_r - ds_l)/L,
// so omega = (v_r - v_l)/L is used here and everywhere else. Treated as a typo
// in the source, which is an assumption rather than a confirmed erratum.
BodyVelocity wheels_to_body(const WheelRimSpeeds& v, const RobotGeometry& geom);

PoseRate pose_rate(const Pose& p, const BodyVelocity& b);

/// Arc length rolled by each wheel over dt. Throws std::invalid_argument for dt <= 0.
WheelIncrements wheel_increments(const WheelAngularSpeeds& w, double dt,
                                 const RobotGeometry& geom);

Displacement increments_to_displacement(double ds_l, double ds_r, const RobotGeometry& geom);

/// Midpoint-heading dead-reckoning update:
///   x' = x + ds cos(theta + dtheta/2), y' = y + ds sin(theta + dtheta/2),
///   theta' = wrap(theta + dtheta).
Pose dead_reckon_step(const Pose& p, const Displacement& d);

}  // namespace ddloc
