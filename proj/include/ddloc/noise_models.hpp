#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddloc/ekf.hpp"
#include "ddloc/kinematics.hpp"

namespace ddloc {

class InsufficientSamples : public std::runtime_error {
 public:
  explicit InsufficientSamples(const std::string& what) : std::runtime_error(what) {}
};

struct ProcessNoiseParams {
  explicit ProcessNoiseParams(double delta = 0.01);
  double delta;
};

/// Q_k = diag(delta * omega_r^2, delta * omega_l^2). The variance, not the
/// standard deviation, is proportional to the squared wheel speed.
Eigen::Matrix2d build_q(const WheelAngularSpeeds& w, const ProcessNoiseParams& params);

/// Sliding window over the most recent `capacity` samples.
template <typename T>
class ResidualWindow {
 public:
  explicit ResidualWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ResidualWindow: capacity must be >= 1");
  }

  void push(const T& sample) {
    if (samples_.size() == capacity_) samples_.pop_front();
    samples_.push_back(sample);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  bool full() const { return samples_.size() == capacity_; }
  const std::deque<T>& samples() const { return samples_; }

 private:
  std::size_t capacity_;
  std::deque<T> samples_;
};

/// Heading seen by the compass and by encoder integration at the same tick.
struct HeadingPair {
  double compass = 0.0;
  double encoder = 0.0;
};

/// Odometry position minus filter prior, per axis.
struct PositionResidual {
  double dx = 0.0;
  double dy = 0.0;
};

/// r33 = (1/N) sum (theta_C - theta_E)^2 over the window, differences wrapped.
double estimate_r33(const ResidualWindow<HeadingPair>& win);

struct PositionNoise {
  double r11 = 0.0;
  double r22 = 0.0;
};

/// Per-axis mean square of the windowed residuals.
PositionNoise estimate_r_position(const ResidualWindow<PositionResidual>& win);

/// Online R_k estimator: windowed estimates once the window has filled,
/// configured floors before that and as a lower bound afterwards.
class MeasurementNoiseEstimator {
 public:
  MeasurementNoiseEstimator(std::size_t window, MeasurementNoise floor);

  void add(const HeadingPair& heading, const PositionResidual& position);
  MeasurementNoise current() const;
  bool warmed_up() const { return headings_.full() && positions_.full(); }

 private:
  MeasurementNoise floor_;
  ResidualWindow<HeadingPair> headings_;
  ResidualWindow<PositionResidual> positions_;
};

/// Default floor: 1e-4 m^2 on position, (0.1 deg)^2 on heading.
MeasurementNoise default_noise_floor();

/// One constant-speed calibration drive. Index k of `truth` and `predicted`
/// refers to the same instant; predicted[k] is the kinematic model applied to
/// truth[k-1] with the encoder increments of step k. Entry 0 is the start
/// pose in both series.
struct CalibrationRun {
  enum class Kind { Straight, Spin };

  Kind kind = Kind::Straight;
  std::vector<Pose> truth;
  std::vector<Pose> predicted;
  std::vector<WheelAngularSpeeds> speeds;  // measured, one per step (size = poses - 1)
  double dt = 0.1;
};

/// Least-squares fit of delta from per-step model errors: translation error
/// on straight drives, rotation error on spins, both regressed on omega^2.
ProcessNoiseParams calibrate_delta(std::span<const CalibrationRun> runs,
                                   const RobotGeometry& geom);

}  // namespace ddloc
