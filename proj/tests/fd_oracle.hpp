#pragma once

// Central finite-difference Jacobians of the dead-reckoning update, built
// by value from the increment -> displacement -> midpoint chain. Test-only.

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "ddloc/kinematics.hpp"

namespace ddloc::oracle {

// Pose change over one step, kept separate from the pose itself so the
// differences are not swamped by the magnitude of x and y.
inline Eigen::Vector3d step_increment(const Eigen::Vector3d& x, double omega_r, double omega_l,
                                      double dt, const RobotGeometry& geom) {
  const WheelIncrements inc = wheel_increments({omega_r, omega_l}, dt, geom);
  const Displacement d = increments_to_displacement(inc.ds_l, inc.ds_r, geom);
  const double mid = x(2) + 0.5 * d.dtheta;
  return {d.ds * std::cos(mid), d.ds * std::sin(mid), d.dtheta};
}

inline Eigen::Matrix3d fd_jacobian_state(const Eigen::Vector3d& x, double omega_r,
                                         double omega_l, double dt, const RobotGeometry& geom,
                                         double h = 1e-6) {
  Eigen::Matrix3d j = Eigen::Matrix3d::Identity();
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(i) = h;
    j.col(i) += (step_increment(x + e, omega_r, omega_l, dt, geom) -
                 step_increment(x - e, omega_r, omega_l, dt, geom)) /
                (2.0 * h);
  }
  return j;
}

inline Eigen::Matrix<double, 3, 2> fd_jacobian_input(const Eigen::Vector3d& x, double omega_r,
                                                     double omega_l, double dt,
                                                     const RobotGeometry& geom,
                                                     double h = 1e-6) {
  Eigen::Matrix<double, 3, 2> j;
  j.col(0) = (step_increment(x, omega_r + h, omega_l, dt, geom) -
              step_increment(x, omega_r - h, omega_l, dt, geom)) /
             (2.0 * h);
  j.col(1) = (step_increment(x, omega_r, omega_l + h, dt, geom) -
              step_increment(x, omega_r, omega_l - h, dt, geom)) /
             (2.0 * h);
  return j;
}

/// max |a - b| / max |b|.
template <typename M>
double relative_error(const M& a, const M& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace ddloc::oracle
