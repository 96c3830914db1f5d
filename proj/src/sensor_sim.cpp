#include "ddloc/sensor_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace ddloc {

namespace {

// Angles landing within this many counts below a count boundary are treated
// as on it, so exact multiples survive the division by 2*pi.
constexpr double kCountEpsilon = 1e-9;

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw std::invalid_argument(field + ": " + why);
}

}  // namespace

int SimParams::fine_steps_per_tick() const {
  return static_cast<int>(std::lround(dt_sensor / dt_fine));
}

void SimParams::validate() const {
  require(dt_sensor > 0.0 && std::isfinite(dt_sensor), "dt_sensor", "must be > 0");
  require(dt_fine > 0.0 && dt_fine <= dt_sensor, "dt_fine", "must be in (0, dt_sensor]");
  const double ratio = dt_sensor / dt_fine;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio, "dt_fine",
          "must divide dt_sensor evenly");
  require(encoder_cpr > 0, "encoder_cpr", "must be > 0");
  require(quad_decode_factor == 1 || quad_decode_factor == 2 || quad_decode_factor == 4,
          "quad_decode_factor", "must be 1, 2 or 4");
  require(compass_sigma >= 0.0, "compass_sigma", "must be >= 0");
  require(compass_quantum >= 0.0, "compass_quantum", "must be >= 0");
  require(speed_ripple_frac >= 0.0 && speed_ripple_frac < 1.0, "speed_ripple_frac",
          "must be in [0, 1)");
  require(slip_delta >= 0.0, "slip_delta", "must be >= 0");
}

Pose integrate_truth(const Pose& p, const WheelRimSpeeds& actual, double dt,
                     const RobotGeometry& geom) {
  const BodyVelocity b = wheels_to_body(actual, geom);
  const double th = p.theta();
  if (std::abs(b.omega) < 1e-12) {
    return Pose(p.x() + b.v * dt * std::cos(th), p.y() + b.v * dt * std::sin(th), th);
  }
  const double radius = b.v / b.omega;
  const double th_end = th + b.omega * dt;
  return Pose(p.x() + radius * (std::sin(th_end) - std::sin(th)),
              p.y() - radius * (std::cos(th_end) - std::cos(th)), th_end);
}

ActuatedSpeeds apply_actuation_noise(const WheelAngularSpeeds& commanded, const SimParams& params,
                                     Rng& rng) {
  std::uniform_real_distribution<double> ripple(-params.speed_ripple_frac,
                                                params.speed_ripple_frac);
  std::normal_distribution<double> unit(0.0, 1.0);

  // Draw order is fixed (ripple r, ripple l, slip r, slip l) for reproducibility.
  ActuatedSpeeds out;
  const double rip_r = params.speed_ripple_frac > 0.0 ? ripple(rng) : 0.0;
  const double rip_l = params.speed_ripple_frac > 0.0 ? ripple(rng) : 0.0;
  out.wheel.omega_r = commanded.omega_r * (1.0 + rip_r);
  out.wheel.omega_l = commanded.omega_l * (1.0 + rip_l);

  const double slip_std = std::sqrt(params.slip_delta);
  const double n_r = slip_std > 0.0 ? unit(rng) : 0.0;
  const double n_l = slip_std > 0.0 ? unit(rng) : 0.0;
  out.ground.omega_r = out.wheel.omega_r + slip_std * std::abs(out.wheel.omega_r) * n_r;
  out.ground.omega_l = out.wheel.omega_l + slip_std * std::abs(out.wheel.omega_l) * n_l;
  return out;
}

EncoderSample sample_encoders(double angle_l, double angle_r, double timestamp,
                              const SimParams& params) {
  const double counts_per_rad = params.counts_per_rev() / kTwoPi;
  auto quantize = [&](double angle) {
    return static_cast<std::int64_t>(std::floor(angle * counts_per_rad + kCountEpsilon));
  };
  return {quantize(angle_l), quantize(angle_r), timestamp};
}

WheelIncrements decode_encoders(const EncoderSample& prev, const EncoderSample& curr,
                                const RobotGeometry& geom, const SimParams& params) {
  if (!(curr.timestamp > prev.timestamp)) {
    throw std::invalid_argument("decode_encoders: timestamps must be strictly increasing");
  }
  const double m_per_count = params.rad_per_count() * geom.wheel_radius();
  return {static_cast<double>(curr.ticks_l - prev.ticks_l) * m_per_count,
          static_cast<double>(curr.ticks_r - prev.ticks_r) * m_per_count};
}

double quantize_heading(double heading, double quantum) {
  const double h = wrap_angle(heading);
  if (quantum <= 0.0) return h;
  const double steps_per_half_turn = kPi / quantum;
  double n = std::round(h / quantum);
  // Keep the index inside (-pi, pi] before scaling back.
  if (n <= -steps_per_half_turn) n += 2.0 * std::round(steps_per_half_turn);
  if (n > steps_per_half_turn) n -= 2.0 * std::round(steps_per_half_turn);
  const double out = n * quantum;
  return out > kPi ? kPi : out;
}

CompassSample sample_compass(double true_heading, double timestamp, const SimParams& params,
                             Rng& rng) {
  double noisy = true_heading;
  if (params.compass_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, params.compass_sigma);
    noisy += noise(rng);
  }
  return {quantize_heading(noisy, params.compass_quantum), timestamp};
}

void ControllerParams::validate() const {
  require(straight_speed > 0.0 && straight_speed <= 0.3, "straight_speed",
          "must be in (0, 0.3] m/s");
  require(turn_speed >= 0.0 && turn_speed < straight_speed, "turn_speed",
          "must be in [0, straight_speed)");
  require(capture_radius > 0.0, "capture_radius", "must be > 0");
  require(heading_deadband >= 0.0 && heading_deadband < kPi, "heading_deadband",
          "must be in [0, pi)");
}

PathController::PathController(std::vector<Waypoint> plan, const Pose& start,
                               ControllerParams params)
    : plan_(std::move(plan)), params_(params), segment_start_{start.x(), start.y()} {
  if (plan_.empty()) throw std::invalid_argument("PathController: plan is empty");
  params_.validate();
}

WheelRimSpeeds PathController::command(const Pose& estimate) {
  while (next_ < plan_.size()) {
    const Waypoint& target = plan_[next_];
    const double to_x = target.x - estimate.x();
    const double to_y = target.y - estimate.y();
    const double seg_x = target.x - segment_start_.x;
    const double seg_y = target.y - segment_start_.y;
    const bool captured = std::hypot(to_x, to_y) < params_.capture_radius;
    const bool passed = (to_x * seg_x + to_y * seg_y) < 0.0;
    if (!captured && !passed) break;
    segment_start_ = target;
    ++next_;
  }
  if (finished()) return {0.0, 0.0};

  const Waypoint& target = plan_[next_];
  const double bearing = std::atan2(target.y - estimate.y(), target.x - estimate.x());
  const double error = wrap_angle(bearing - estimate.theta());
  if (error > params_.heading_deadband) {
    return {params_.straight_speed, params_.turn_speed};  // left: slow the left wheel
  }
  if (error < -params_.heading_deadband) {
    return {params_.turn_speed, params_.straight_speed};
  }
  return {params_.straight_speed, params_.straight_speed};
}

std::vector<Waypoint> rounded_rectangle_plan(double width, double height, double corner_radius,
                                             double arc_step) {
  require(corner_radius > 0.0, "corner_radius", "must be > 0");
  require(width > 2.0 * corner_radius, "rect_width", "must exceed twice the corner radius");
  require(height > 2.0 * corner_radius, "rect_height", "must exceed twice the corner radius");
  require(arc_step > 0.0 && arc_step <= kPi / 2.0, "arc_step", "must be in (0, pi/2]");

  const double r = corner_radius;
  // Corner centres, visited counter-clockwise starting bottom-right.
  const Waypoint centres[4] = {{width - r, r}, {width - r, height - r}, {r, height - r}, {r, r}};
  const int pieces = static_cast<int>(std::ceil(kPi / 2.0 / arc_step - 1e-9));

  std::vector<Waypoint> plan;
  for (int c = 0; c < 4; ++c) {
    const double a0 = -kPi / 2.0 + c * kPi / 2.0;  // entry angle on the corner circle
    plan.push_back({centres[c].x + r * std::cos(a0), centres[c].y + r * std::sin(a0)});
    for (int i = 1; i <= pieces; ++i) {
      const double a = a0 + (kPi / 2.0) * i / pieces;
      plan.push_back({centres[c].x + r * std::cos(a), centres[c].y + r * std::sin(a)});
    }
  }
  return plan;
}

Simulator::Simulator(SimParams params, RobotGeometry geom, const Pose& start)
    : params_(params), geom_(geom), rng_(params.seed), truth_(start) {
  params_.validate();
  last_encoders_ = sample_encoders(0.0, 0.0, 0.0, params_);
}

Simulator::Tick Simulator::tick(const WheelRimSpeeds& command) {
  Tick out;
  out.speeds = apply_actuation_noise(to_angular_speeds(command, geom_), params_, rng_);
  const WheelRimSpeeds ground = to_rim_speeds(out.speeds.ground, geom_);

  const int n = params_.fine_steps_per_tick();
  const double h = params_.dt_sensor / n;
  for (int i = 0; i < n; ++i) {
    angle_l_ += out.speeds.wheel.omega_l * h;
    angle_r_ += out.speeds.wheel.omega_r * h;
    truth_ = integrate_truth(truth_, ground, h, geom_);
  }
  ++ticks_;

  out.truth = truth_;
  out.encoders = sample_encoders(angle_l_, angle_r_, time(), params_);
  out.compass = sample_compass(truth_.theta(), time(), params_, rng_);
  last_encoders_ = out.encoders;
  return out;
}

}  // namespace ddloc
