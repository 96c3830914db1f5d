#include "ddloc/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ddloc {

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::domain_error("wrap_angle: non-finite angle");
  }
  // remainder() lands in [-pi, pi]; fold the lower end over.
  double r = std::remainder(theta, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r = kPi;
  return r;
}

Pose::Pose(double x, double y, double theta) : x_(x), y_(y), theta_(wrap_angle(theta)) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::domain_error("Pose: non-finite position");
  }
}

RobotGeometry::RobotGeometry(double wheel_radius, double track_width)
    : wheel_radius_(wheel_radius), track_width_(track_width) {
  if (!(wheel_radius > 0.0) || !std::isfinite(wheel_radius)) {
    throw std::invalid_argument("RobotGeometry: wheel_radius must be > 0, got " +
                                std::to_string(wheel_radius));
  }
  if (!(track_width > 0.0) || !std::isfinite(track_width)) {
    throw std::invalid_argument("RobotGeometry: track_width must be > 0, got " +
                                std::to_string(track_width));
  }
}

WheelRimSpeeds to_rim_speeds(const WheelAngularSpeeds& w, const RobotGeometry& geom) {
  return {w.omega_r * geom.wheel_radius(), w.omega_l * geom.wheel_radius()};
}

WheelAngularSpeeds to_angular_speeds(const WheelRimSpeeds& v, const RobotGeometry& geom) {
  return {v.v_r / geom.wheel_radius(), v.v_l / geom.wheel_radius()};
}

BodyVelocity wheels_to_body(const WheelRimSpeeds& v, const RobotGeometry& geom) {
  return {0.5 * (v.v_r + v.v_l), (v.v_r - v.v_l) / geom.track_width()};
}

PoseRate pose_rate(const Pose& p, const BodyVelocity& b) {
  return {b.v * std::cos(p.theta()), b.v * std::sin(p.theta()), b.omega};
}

WheelIncrements wheel_increments(const WheelAngularSpeeds& w, double dt,
                                 const RobotGeometry& geom) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("wheel_increments: dt must be > 0");
  }
  return {dt * geom.wheel_radius() * w.omega_l, dt * geom.wheel_radius() * w.omega_r};
}

Displacement increments_to_displacement(double ds_l, double ds_r, const RobotGeometry& geom) {
  return {ds_l, ds_r, 0.5 * (ds_l + ds_r), (ds_r - ds_l) / geom.track_width()};
}

Pose dead_reckon_step(const Pose& p, const Displacement& d) {
  const double mid = p.theta() + 0.5 * d.dtheta;
  return Pose(p.x() + d.ds * std::cos(mid), p.y() + d.ds * std::sin(mid), p.theta() + d.dtheta);
}

}  // namespace ddloc
