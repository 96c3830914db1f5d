#include "ddloc/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "ddloc/ekf.hpp"
#include "ddloc/sensor_sim.hpp"

namespace ddloc {

Deviation deviation(const Pose& estimate, const Pose& truth) {
  return {estimate.x() - truth.x(), estimate.y() - truth.y(),
          wrap_angle(estimate.theta() - truth.theta())};
}

TrajectoryLog run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SimParams params = cfg.sim;
  params.seed = seed;

  const RobotGeometry& geom = cfg.geometry;
  const Pose start = cfg.start_pose();
  Simulator sim(params, geom, start);
  PathController controller(cfg.plan(), start, cfg.controller);
  MeasurementNoiseEstimator noise(cfg.r_window, cfg.r_floor);

  Pose odometry = start;
  StateEstimate estimate = StateEstimate::initial(start, cfg.initial_variance);
  EncoderSample prev_encoders = sim.last_encoders();

  TrajectoryLog log;
  log.with_ekf = cfg.with_ekf;
  const std::size_t ticks = cfg.tick_count();
  log.rows.reserve(ticks);

  for (std::size_t k = 0; k < ticks; ++k) {
    const WheelRimSpeeds command = controller.command(cfg.with_ekf ? estimate.mean : odometry);
    const Simulator::Tick tick = sim.tick(command);

    const WheelIncrements inc = decode_encoders(prev_encoders, tick.encoders, geom, params);
    prev_encoders = tick.encoders;
    const Displacement disp = increments_to_displacement(inc.ds_l, inc.ds_r, geom);
    odometry = dead_reckon_step(odometry, disp);

    LogRow row;
    row.t = tick.encoders.timestamp;
    row.truth = tick.truth;
    row.odometry = odometry;
    row.odometry_dev = deviation(odometry, tick.truth);

    if (cfg.with_ekf) {
      const double per_speed = 1.0 / (geom.wheel_radius() * params.dt_sensor);
      const WheelAngularSpeeds measured{inc.ds_r * per_speed, inc.ds_l * per_speed};
      const ProcessInput input(measured, params.dt_sensor, build_q(measured, cfg.process_noise));
      const StateEstimate prior = predict(estimate, input, geom);

      // Encoder heading for the r33 window is the encoder increment applied to
      // the last estimate; the free-running odometry heading drifts without
      // bound and would swamp the compass disagreement.
      noise.add({tick.compass.heading, prior.mean.theta()},
                {odometry.x() - prior.mean.x(), odometry.y() - prior.mean.y()});
      const Measurement z(odometry.x(), odometry.y(), tick.compass.heading, noise.current());
      estimate = update(prior, z);

      EkfColumns ekf;
      ekf.pose = estimate.mean;
      ekf.p_diag = estimate.covariance.diagonal();
      ekf.dev = deviation(estimate.mean, tick.truth);
      row.ekf = ekf;
    }
    log.rows.push_back(row);
  }
  return log;
}

namespace {

EstimatorMetrics metrics_of(const std::vector<Deviation>& devs) {
  EstimatorMetrics m;
  for (const Deviation& d : devs) {
    const double pos2 = d.dx * d.dx + d.dy * d.dy;
    m.rms_x += d.dx * d.dx;
    m.rms_y += d.dy * d.dy;
    m.rms_theta += d.dtheta * d.dtheta;
    m.rms_position += pos2;
    m.max_position = std::max(m.max_position, std::sqrt(pos2));
  }
  const auto n = static_cast<double>(devs.size());
  m.rms_x = std::sqrt(m.rms_x / n);
  m.rms_y = std::sqrt(m.rms_y / n);
  m.rms_theta = std::sqrt(m.rms_theta / n);
  m.rms_position = std::sqrt(m.rms_position / n);
  const Deviation& last = devs.back();
  m.final_position = std::hypot(last.dx, last.dy);
  m.final_theta = std::abs(last.dtheta);
  return m;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

RunSummary compute_metrics(const TrajectoryLog& log) {
  if (log.rows.empty()) throw std::invalid_argument("compute_metrics: empty trajectory log");
  std::vector<Deviation> odo;
  std::vector<Deviation> ekf;
  odo.reserve(log.rows.size());
  for (const LogRow& row : log.rows) {
    odo.push_back(row.odometry_dev);
    if (log.with_ekf) {
      if (!row.ekf) throw std::invalid_argument("compute_metrics: row without filter columns");
      ekf.push_back(row.ekf->dev);
    }
  }
  RunSummary s;
  s.odometry = metrics_of(odo);
  if (log.with_ekf) s.ekf = metrics_of(ekf);
  return s;
}

AggregateMetrics aggregate(const std::vector<EstimatorMetrics>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  AggregateMetrics out;
  auto field = [&](double EstimatorMetrics::*member) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const EstimatorMetrics& m : runs) v.push_back(m.*member);
    out.median.*member = median_of(v);
    out.mean.*member = mean_of(v);
  };
  field(&EstimatorMetrics::rms_x);
  field(&EstimatorMetrics::rms_y);
  field(&EstimatorMetrics::rms_theta);
  field(&EstimatorMetrics::rms_position);
  field(&EstimatorMetrics::max_position);
  field(&EstimatorMetrics::final_position);
  field(&EstimatorMetrics::final_theta);
  return out;
}

MonteCarloResult monte_carlo(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());

  MonteCarloResult result;
  result.runs.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      SeedOutcome& out = result.runs[i];
      out.seed = seeds[i];
      try {
        out.summary = compute_metrics(run_scenario(cfg, seeds[i]));
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, seeds.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<EstimatorMetrics> odo;
  std::vector<EstimatorMetrics> ekf;
  for (const SeedOutcome& run : result.runs) {
    if (!run.summary) continue;
    ++result.completed;
    odo.push_back(run.summary->odometry);
    if (run.summary->ekf) ekf.push_back(*run.summary->ekf);
  }
  if (!odo.empty()) result.odometry = aggregate(odo);
  if (!ekf.empty()) result.ekf = aggregate(ekf);
  return result;
}

CalibrationRun simulate_calibration_run(CalibrationRun::Kind kind, double rim_speed,
                                        std::size_t steps, const SimParams& params,
                                        const RobotGeometry& geom) {
  const WheelRimSpeeds command = kind == CalibrationRun::Kind::Straight
                                     ? WheelRimSpeeds{rim_speed, rim_speed}
                                     : WheelRimSpeeds{rim_speed, -rim_speed};
  Simulator sim(params, geom, Pose());
  CalibrationRun run;
  run.kind = kind;
  run.dt = params.dt_sensor;
  run.truth.push_back(sim.truth());
  run.predicted.push_back(sim.truth());
  EncoderSample prev = sim.last_encoders();
  const double per_speed = 1.0 / (geom.wheel_radius() * params.dt_sensor);

  for (std::size_t k = 0; k < steps; ++k) {
    const Pose from = sim.truth();
    const Simulator::Tick tick = sim.tick(command);
    const WheelIncrements inc = decode_encoders(prev, tick.encoders, geom, params);
    prev = tick.encoders;
    run.truth.push_back(tick.truth);
    run.predicted.push_back(
        dead_reckon_step(from, increments_to_displacement(inc.ds_l, inc.ds_r, geom)));
    run.speeds.push_back({inc.ds_r * per_speed, inc.ds_l * per_speed});
  }
  return run;
}

}  // namespace ddloc
