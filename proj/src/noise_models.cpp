#include "ddloc/noise_models.hpp"

#include <algorithm>
#include <cmath>

namespace ddloc {

ProcessNoiseParams::ProcessNoiseParams(double d) : delta(d) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("ProcessNoiseParams: delta must be >= 0");
  }
}

Eigen::Matrix2d build_q(const WheelAngularSpeeds& w, const ProcessNoiseParams& params) {
  Eigen::Matrix2d q = Eigen::Matrix2d::Zero();
  q(0, 0) = params.delta * w.omega_r * w.omega_r;
  q(1, 1) = params.delta * w.omega_l * w.omega_l;
  return q;
}

double estimate_r33(const ResidualWindow<HeadingPair>& win) {
  if (win.empty()) throw InsufficientSamples("estimate_r33: empty window");
  double sum = 0.0;
  for (const HeadingPair& h : win.samples()) {
    const double d = wrap_angle(h.compass - h.encoder);
    sum += d * d;
  }
  return sum / static_cast<double>(win.size());
}

PositionNoise estimate_r_position(const ResidualWindow<PositionResidual>& win) {
  if (win.empty()) throw InsufficientSamples("estimate_r_position: empty window");
  PositionNoise out;
  for (const PositionResidual& r : win.samples()) {
    out.r11 += r.dx * r.dx;
    out.r22 += r.dy * r.dy;
  }
  const auto n = static_cast<double>(win.size());
  out.r11 /= n;
  out.r22 /= n;
  return out;
}

MeasurementNoise default_noise_floor() {
  const double compass = deg_to_rad(0.1);
  return {1e-4, 1e-4, compass * compass};
}

MeasurementNoiseEstimator::MeasurementNoiseEstimator(std::size_t window, MeasurementNoise floor)
    : floor_(floor), headings_(window), positions_(window) {
  if (!(floor.r11 >= 0.0) || !(floor.r22 >= 0.0) || !(floor.r33 >= 0.0)) {
    throw std::invalid_argument("MeasurementNoiseEstimator: floors must be >= 0");
  }
}

void MeasurementNoiseEstimator::add(const HeadingPair& heading, const PositionResidual& position) {
  headings_.push(heading);
  positions_.push(position);
}

MeasurementNoise MeasurementNoiseEstimator::current() const {
  if (!warmed_up()) return floor_;
  const PositionNoise pos = estimate_r_position(positions_);
  return {std::max(pos.r11, floor_.r11), std::max(pos.r22, floor_.r22),
          std::max(estimate_r33(headings_), floor_.r33)};
}

namespace {

void check_run(const CalibrationRun& run) {
  if (run.truth.size() != run.predicted.size()) {
    throw std::invalid_argument("calibrate_delta: truth/predicted length mismatch");
  }
  if (run.truth.size() < 2 || run.speeds.size() + 1 != run.truth.size()) {
    throw std::invalid_argument("calibrate_delta: need one speed per step and at least one step");
  }
  if (!(run.dt > 0.0)) throw std::invalid_argument("calibrate_delta: dt must be > 0");
}

}  // namespace

ProcessNoiseParams calibrate_delta(std::span<const CalibrationRun> runs,
                                   const RobotGeometry& geom) {
  const bool has_straight = std::any_of(runs.begin(), runs.end(), [](const CalibrationRun& r) {
    return r.kind == CalibrationRun::Kind::Straight;
  });
  const bool has_spin = std::any_of(runs.begin(), runs.end(), [](const CalibrationRun& r) {
    return r.kind == CalibrationRun::Kind::Spin;
  });
  if (!has_straight || !has_spin) {
    throw std::invalid_argument("calibrate_delta: need at least one straight and one spin run");
  }

  // Each step gives an observed squared error y and its model variance
  // per unit delta, x = g * (omega_r^2 + omega_l^2):
  //   straight: g = (dt R / 2)^2, y = along-track error^2
  //   spin:     g = (dt R / L)^2, y = heading error^2
  // Weighting each residual (y - delta x) by 1/x equalizes the variances of
  // the chi-square terms, and the weighted fit reduces to the mean of y / x.
  double ratio_sum = 0.0;
  std::size_t used = 0;
  for (const CalibrationRun& run : runs) {
    check_run(run);
    const double k = run.dt * geom.wheel_radius();
    const double g = run.kind == CalibrationRun::Kind::Straight
                         ? 0.25 * k * k
                         : (k / geom.track_width()) * (k / geom.track_width());
    for (std::size_t i = 1; i < run.truth.size(); ++i) {
      const WheelAngularSpeeds& w = run.speeds[i - 1];
      const double x = g * (w.omega_r * w.omega_r + w.omega_l * w.omega_l);
      if (!(x > 0.0)) continue;
      double err = 0.0;
      if (run.kind == CalibrationRun::Kind::Straight) {
        const Pose& from = run.truth[i - 1];
        const double ex = run.truth[i].x() - run.predicted[i].x();
        const double ey = run.truth[i].y() - run.predicted[i].y();
        err = ex * std::cos(from.theta()) + ey * std::sin(from.theta());
      } else {
        err = wrap_angle(run.truth[i].theta() - run.predicted[i].theta());
      }
      ratio_sum += err * err / x;
      ++used;
    }
  }
  if (used == 0) {
    throw std::invalid_argument("calibrate_delta: all wheel speeds are zero");
  }
  return ProcessNoiseParams(std::max(0.0, ratio_sum / static_cast<double>(used)));
}

}  // namespace ddloc
