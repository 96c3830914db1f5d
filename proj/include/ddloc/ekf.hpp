#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "ddloc/kinematics.hpp"

namespace ddloc {

/// Raised when the filter would have to invert a singular innovation
/// covariance or propagate an indefinite covariance.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Diagonal of the measurement noise covariance R_k.
struct MeasurementNoise {
  double r11 = 0.0;  // m^2
  double r22 = 0.0;  // m^2
  double r33 = 0.0;  // rad^2

  Eigen::Matrix3d matrix() const;
};

/// Absolute pose observation z = (x, y, theta), h(x) = x.
struct Measurement {
  Measurement(double x, double y, double theta, MeasurementNoise noise);

  double x_meas;
  double y_meas;
  double theta_meas;  // wrapped on construction
  MeasurementNoise noise;
};

/// Odometry input for one filter tick: measured wheel speeds held over dt,
/// plus their 2x2 covariance (order: right, left).
struct ProcessInput {
  ProcessInput(WheelAngularSpeeds speeds, double dt, const Eigen::Matrix2d& q);

  WheelAngularSpeeds speeds;
  double dt;
  Eigen::Matrix2d q;
};

struct StateEstimate {
  Pose mean;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();

  /// Start-of-mission belief: configured pose, 1e-6 on every diagonal entry.
  static StateEstimate initial(const Pose& start, double variance = 1e-6);
};

/// Displacement the noise-free input produces over one tick.
Displacement input_displacement(const ProcessInput& in, const RobotGeometry& geom);

/// d f / d (x, y, theta) of the dead-reckoning update.
Eigen::Matrix3d jacobian_a(const Pose& p, const Displacement& d);

/// d f / d (omega_r, omega_l): wheel-speed noise pushed through the
/// increment, displacement and midpoint update chain.
Eigen::Matrix<double, 3, 2> jacobian_w(const Pose& p, const ProcessInput& in,
                                       const RobotGeometry& geom);

/// Time update. P- = A P A^T + W Q W^T, re-symmetrized.
StateEstimate predict(const StateEstimate& s, const ProcessInput& in, const RobotGeometry& geom);

/// Measurement update with H = V = I. The heading innovation is wrapped.
StateEstimate update(const StateEstimate& prior, const Measurement& z);

/// predict, then update when a measurement is available this tick.
StateEstimate step(const StateEstimate& s, const ProcessInput& in,
                   const std::optional<Measurement>& z, const RobotGeometry& geom);

/// Innovation z - h(x-) with the heading term wrapped.
Eigen::Vector3d innovation(const StateEstimate& prior, const Measurement& z);

double max_asymmetry(const Eigen::Matrix3d& m);
double min_eigenvalue(const Eigen::Matrix3d& m);

}  // namespace ddloc
