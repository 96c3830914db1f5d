#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ddloc/kinematics.hpp"

namespace ddloc {

using Rng = std::mt19937_64;

struct SimParams {
  double dt_sensor = 0.1;                     // s, filter and sensor period
  double dt_fine = 0.001;                     // s, truth integration step
  int encoder_cpr = 500;                      // lines per wheel revolution
  int quad_decode_factor = 4;                 // edges counted per line
  double compass_sigma = deg_to_rad(0.1);     // rad
  double compass_quantum = deg_to_rad(0.1);   // rad
  double speed_ripple_frac = 0.05;            // speed-loop ripple, +/- fraction
  double slip_delta = 0.01;                   // slip variance per omega^2
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  int counts_per_rev() const { return encoder_cpr * quad_decode_factor; }
  double rad_per_count() const { return kTwoPi / counts_per_rev(); }
  int fine_steps_per_tick() const;
};

struct EncoderSample {
  std::int64_t ticks_l = 0;
  std::int64_t ticks_r = 0;
  double timestamp = 0.0;
};

struct CompassSample {
  double heading = 0.0;  // rad, multiple of the quantum
  double timestamp = 0.0;
};

/// Wheel speeds after the actuation stage. Speed-loop ripple turns the
/// wheels (the encoders see it); slip acts only between tyre and floor.
struct ActuatedSpeeds {
  WheelAngularSpeeds wheel;
  WheelAngularSpeeds ground;
};

/// Exact constant-curvature motion over dt.
Pose integrate_truth(const Pose& p, const WheelRimSpeeds& actual, double dt,
                     const RobotGeometry& geom);

/// Multiplies each commanded speed by (1 + U(-f, f)), then adds slip noise
/// N(0, slip_delta * omega^2) to get the ground-effective speed.
ActuatedSpeeds apply_actuation_noise(const WheelAngularSpeeds& commanded, const SimParams& params,
                                     Rng& rng);

/// Quantizes accumulated wheel angles (rad) to quadrature counts.
EncoderSample sample_encoders(double angle_l, double angle_r, double timestamp,
                              const SimParams& params);

/// Arc length rolled by each wheel between two samples. Throws
/// std::invalid_argument unless curr is strictly later than prev.
WheelIncrements decode_encoders(const EncoderSample& prev, const EncoderSample& curr,
                                const RobotGeometry& geom, const SimParams& params);

/// Rounds a heading to the nearest multiple of `quantum`, staying in (-pi, pi].
double quantize_heading(double heading, double quantum);

CompassSample sample_compass(double true_heading, double timestamp, const SimParams& params,
                             Rng& rng);

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
};

struct ControllerParams {
  double straight_speed = 0.3;              // m/s, both wheels
  double turn_speed = 0.05;                 // m/s, inner wheel while turning
  double capture_radius = 0.05;             // m
  double heading_deadband = deg_to_rad(2.0);

  void validate() const;
};

/// Waypoint follower using the two fixed speed settings: both wheels at the
/// straight speed when the target is ahead, otherwise the wheel on the side
/// of the turn drops to the turn speed. A waypoint is consumed once the robot
/// is within the capture radius or has passed it along the segment direction.
class PathController {
 public:
  PathController(std::vector<Waypoint> plan, const Pose& start, ControllerParams params = {});

  WheelRimSpeeds command(const Pose& estimate);

  bool finished() const { return next_ >= plan_.size(); }
  std::size_t next_index() const { return next_; }

 private:
  std::vector<Waypoint> plan_;
  ControllerParams params_;
  std::size_t next_ = 0;
  Waypoint segment_start_;
};

/// Counter-clockwise rounded rectangle with its lower-left corner at the
/// origin. Starts and ends at (corner_radius, 0); the robot should start
/// there facing +x. Corner arcs are sampled every `arc_step` radians.
std::vector<Waypoint> rounded_rectangle_plan(double width, double height, double corner_radius,
                                             double arc_step = deg_to_rad(15.0));

/// Seeded world: owns the truth pose, wheel angles and the RNG stream.
class Simulator {
 public:
  Simulator(SimParams params, RobotGeometry geom, const Pose& start);

  struct Tick {
    Pose truth;
    ActuatedSpeeds speeds;
    EncoderSample encoders;
    CompassSample compass;
  };

  /// Advances one sensor period under the given command.
  Tick tick(const WheelRimSpeeds& command);

  const Pose& truth() const { return truth_; }
  const EncoderSample& last_encoders() const { return last_encoders_; }
  double time() const { return static_cast<double>(ticks_) * params_.dt_sensor; }

 private:
  SimParams params_;
  RobotGeometry geom_;
  Rng rng_;
  Pose truth_;
  double angle_l_ = 0.0;
  double angle_r_ = 0.0;
  std::int64_t ticks_ = 0;
  EncoderSample last_encoders_;
};

}  // namespace ddloc
