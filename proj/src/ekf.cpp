#include "ddloc/ekf.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace ddloc {

namespace {

// Absolute slack for PSD checks, scaled by the matrix magnitude.
double psd_tolerance(const Eigen::Matrix3d& m) {
  return 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

Eigen::Matrix3d symmetrized(const Eigen::Matrix3d& m) { return 0.5 * (m + m.transpose()); }

void require_psd(const Eigen::Matrix3d& p, const char* where) {
  if (!p.allFinite()) {
    throw NumericError(std::string(where) + ": covariance has non-finite entries");
  }
  if (max_asymmetry(p) > psd_tolerance(p)) {
    throw NumericError(std::string(where) + ": covariance is not symmetric");
  }
  if (min_eigenvalue(p) < -psd_tolerance(p)) {
    throw NumericError(std::string(where) + ": covariance is not positive semidefinite");
  }
}

}  // namespace

Eigen::Matrix3d MeasurementNoise::matrix() const {
  return Eigen::Vector3d(r11, r22, r33).asDiagonal();
}

Measurement::Measurement(double x, double y, double theta, MeasurementNoise n)
    : x_meas(x), y_meas(y), theta_meas(wrap_angle(theta)), noise(n) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("Measurement: non-finite position");
  }
  if (!(n.r11 >= 0.0) || !(n.r22 >= 0.0) || !(n.r33 >= 0.0)) {
    throw std::invalid_argument("Measurement: noise variances must be >= 0");
  }
}

ProcessInput::ProcessInput(WheelAngularSpeeds w, double step_dt, const Eigen::Matrix2d& noise)
    : speeds(w), dt(step_dt), q(noise) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("ProcessInput: dt must be > 0");
  }
  if (!std::isfinite(w.omega_r) || !std::isfinite(w.omega_l)) {
    throw std::invalid_argument("ProcessInput: non-finite wheel speed");
  }
  if (!q.allFinite() || q(0, 1) != 0.0 || q(1, 0) != 0.0 || q(0, 0) < 0.0 || q(1, 1) < 0.0) {
    throw std::invalid_argument("ProcessInput: q must be diagonal with non-negative entries");
  }
}

StateEstimate StateEstimate::initial(const Pose& start, double variance) {
  return {start, Eigen::Matrix3d::Identity() * variance};
}

Displacement input_displacement(const ProcessInput& in, const RobotGeometry& geom) {
  const WheelIncrements inc = wheel_increments(in.speeds, in.dt, geom);
  return increments_to_displacement(inc.ds_l, inc.ds_r, geom);
}

Eigen::Matrix3d jacobian_a(const Pose& p, const Displacement& d) {
  const double mid = p.theta() + 0.5 * d.dtheta;
  Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  a(0, 2) = -d.ds * std::sin(mid);
  a(1, 2) = d.ds * std::cos(mid);
  return a;
}

Eigen::Matrix<double, 3, 2> jacobian_w(const Pose& p, const ProcessInput& in,
                                       const RobotGeometry& geom) {
  const Displacement d = input_displacement(in, geom);
  const double mid = p.theta() + 0.5 * d.dtheta;
  const double c = std::cos(mid);
  const double s = std::sin(mid);

  // d(x', y', theta') / d(ds, dtheta)
  Eigen::Matrix<double, 3, 2> pose_by_disp;
  pose_by_disp << c, -0.5 * d.ds * s,
                  s, 0.5 * d.ds * c,
                  0.0, 1.0;

  // d(ds, dtheta) / d(omega_r, omega_l)
  const double k = in.dt * geom.wheel_radius();
  Eigen::Matrix2d disp_by_speed;
  disp_by_speed << 0.5 * k, 0.5 * k,
                   k / geom.track_width(), -k / geom.track_width();

  return pose_by_disp * disp_by_speed;
}

StateEstimate predict(const StateEstimate& s, const ProcessInput& in, const RobotGeometry& geom) {
  require_psd(s.covariance, "predict");
  const Displacement d = input_displacement(in, geom);
  const Eigen::Matrix3d a = jacobian_a(s.mean, d);
  const Eigen::Matrix<double, 3, 2> w = jacobian_w(s.mean, in, geom);

  StateEstimate out;
  out.mean = dead_reckon_step(s.mean, d);
  out.covariance = symmetrized(a * s.covariance * a.transpose() + w * in.q * w.transpose());
  return out;
}

Eigen::Vector3d innovation(const StateEstimate& prior, const Measurement& z) {
  return {z.x_meas - prior.mean.x(), z.y_meas - prior.mean.y(),
          wrap_angle(z.theta_meas - prior.mean.theta())};
}

StateEstimate update(const StateEstimate& prior, const Measurement& z) {
  require_psd(prior.covariance, "update");
  const Eigen::Matrix3d& p = prior.covariance;
  const Eigen::Matrix3d s = p + z.noise.matrix();

  // K = P S^-1, obtained from S K^T = P without forming S^-1.
  const Eigen::LLT<Eigen::Matrix3d> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericError("update: innovation covariance is singular");
  }
  const Eigen::Matrix3d k = llt.solve(p).transpose();
  if (!k.allFinite()) {
    throw NumericError("update: non-finite Kalman gain");
  }

  const Eigen::Vector3d correction = k * innovation(prior, z);
  StateEstimate out;
  out.mean = Pose(prior.mean.x() + correction(0), prior.mean.y() + correction(1),
                  prior.mean.theta() + correction(2));
  out.covariance = symmetrized((Eigen::Matrix3d::Identity() - k) * p);
  return out;
}

StateEstimate step(const StateEstimate& s, const ProcessInput& in,
                   const std::optional<Measurement>& z, const RobotGeometry& geom) {
  StateEstimate prior = predict(s, in, geom);
  if (!z) return prior;
  return update(prior, *z);
}

double max_asymmetry(const Eigen::Matrix3d& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::Matrix3d& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(symmetrized(m),
                                                          Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace ddloc
