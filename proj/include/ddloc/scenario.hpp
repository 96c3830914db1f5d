#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddloc/kinematics.hpp"
#include "ddloc/noise_models.hpp"
#include "ddloc/scenario_config.hpp"

namespace ddloc {

/// Estimator minus truth, heading wrapped.
struct Deviation {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

Deviation deviation(const Pose& estimate, const Pose& truth);

struct EkfColumns {
  Pose pose;
  Eigen::Vector3d p_diag = Eigen::Vector3d::Zero();
  Deviation dev;
};

struct LogRow {
  double t = 0.0;
  Pose truth;
  Pose odometry;
  Deviation odometry_dev;
  std::optional<EkfColumns> ekf;
};

struct TrajectoryLog {
  bool with_ekf = true;
  std::vector<LogRow> rows;
};

/// One sensor stream drives both estimators: encoder dead reckoning and the
/// encoder+compass filter. The robot steers by the filter estimate when it is
/// enabled, otherwise by odometry.
TrajectoryLog run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

struct EstimatorMetrics {
  double rms_x = 0.0;
  double rms_y = 0.0;
  double rms_theta = 0.0;
  double rms_position = 0.0;
  double max_position = 0.0;
  double final_position = 0.0;
  double final_theta = 0.0;
};

struct RunSummary {
  EstimatorMetrics odometry;
  std::optional<EstimatorMetrics> ekf;
};

/// Throws std::invalid_argument on an empty log.
RunSummary compute_metrics(const TrajectoryLog& log);

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<RunSummary> summary;
  std::string error;  // set when the run failed
};

struct AggregateMetrics {
  EstimatorMetrics median;
  EstimatorMetrics mean;
};

struct MonteCarloResult {
  std::vector<SeedOutcome> runs;  // ascending by seed
  std::size_t completed = 0;
  std::optional<AggregateMetrics> odometry;
  std::optional<AggregateMetrics> ekf;
};

/// Runs every configured seed (on up to `threads` workers, 0 = hardware
/// concurrency) and aggregates over the runs that completed.
MonteCarloResult monte_carlo(const ScenarioConfig& cfg, unsigned threads = 0);

AggregateMetrics aggregate(const std::vector<EstimatorMetrics>& runs);

/// Drives the simulator at a constant command and records, per step, the
/// truth and the one-step kinematic prediction from the previous true pose.
CalibrationRun simulate_calibration_run(CalibrationRun::Kind kind, double rim_speed,
                                        std::size_t steps, const SimParams& params,
                                        const RobotGeometry& geom);

}  // namespace ddloc
