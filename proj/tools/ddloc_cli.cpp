// ddloc: scenario simulation, metrics and LRF projection from the command line.
//
//   ddloc simulate <config> [--seed N] [--out dir]
//   ddloc metrics <log.csv>
//   ddloc montecarlo <config> [--out dir] [--threads N]
//   ddloc lrf-project <sweep.txt> <cloud.txt>
//
// Exit codes: 0 success, 2 configuration or input error, 3 runtime/numeric failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ddloc/ekf.hpp"
#include "ddloc/lrf_geometry.hpp"
#include "ddloc/scenario.hpp"
#include "ddloc/scenario_config.hpp"
#include "ddloc/trajectory_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw RuntimeFailure("cannot write " + path.string());
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ddloc::ConfigError("input", "cannot open " + path.string());
  return in;
}

int cmd_simulate(const fs::path& config, std::optional<std::uint64_t> seed,
                 std::optional<fs::path> out_dir) {
  const ddloc::ScenarioConfig cfg = ddloc::load_scenario(config);
  const std::uint64_t s = seed.value_or(cfg.seeds.front());
  const fs::path dir = out_dir.value_or(cfg.output_dir);

  const ddloc::TrajectoryLog log = ddloc::run_scenario(cfg, s);
  std::ostringstream csv;
  ddloc::write_trajectory_csv(csv, log);

  // Metrics come from the text as written so `metrics` reproduces them.
  std::istringstream reread(csv.str());
  const ddloc::RunSummary summary = ddloc::compute_metrics(ddloc::read_trajectory_csv(reread));
  std::ostringstream text;
  ddloc::write_summary_csv(text, summary);

  const std::string tag = "seed" + std::to_string(s);
  write_file(dir / ("trajectory_" + tag + ".csv"), csv.str());
  write_file(dir / ("summary_" + tag + ".csv"), text.str());
  std::cout << text.str();
  return kExitOk;
}

int cmd_metrics(const fs::path& log_file) {
  std::ifstream in = open_input(log_file);
  const ddloc::TrajectoryLog log = ddloc::read_trajectory_csv(in);
  ddloc::write_summary_csv(std::cout, ddloc::compute_metrics(log));
  return kExitOk;
}

int cmd_montecarlo(const fs::path& config, std::optional<fs::path> out_dir, unsigned threads) {
  const ddloc::ScenarioConfig cfg = ddloc::load_scenario(config);
  const fs::path dir = out_dir.value_or(cfg.output_dir);
  const ddloc::MonteCarloResult result = ddloc::monte_carlo(cfg, threads);

  for (const ddloc::SeedOutcome& run : result.runs) {
    if (!run.summary) std::cerr << "seed " << run.seed << " failed: " << run.error << '\n';
  }
  std::ostringstream runs;
  ddloc::write_montecarlo_runs_csv(runs, result);
  std::ostringstream summary;
  ddloc::write_montecarlo_summary_csv(summary, result);
  write_file(dir / "montecarlo_runs.csv", runs.str());
  write_file(dir / "montecarlo_summary.csv", summary.str());
  std::cout << summary.str();
  if (result.completed == 0) throw RuntimeFailure("no Monte Carlo run completed");
  return kExitOk;
}

int cmd_lrf_project(const fs::path& sweep_file, const fs::path& cloud_file) {
  std::ifstream in = open_input(sweep_file);
  const ddloc::lrf::Cloud cloud = ddloc::lrf::sweep_to_cloud(ddloc::read_sweep(in));
  std::ostringstream text;
  ddloc::write_cloud(text, cloud);
  write_file(cloud_file, text.str());
  std::cerr << "points: " << cloud.points.size() << " rejected: " << cloud.rejected << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential-drive localization: dead reckoning vs. encoder+compass EKF"};
  app.require_subcommand(1);

  std::string sim_config;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::string> sim_out;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its trajectory log");
  simulate->add_option("config", sim_config, "Scenario file")->required();
  simulate->add_option("--seed", sim_seed, "Seed (default: first seed in config)");
  simulate->add_option("--out", sim_out, "Output directory (default: config output_dir)");

  std::string metrics_log;
  auto* metrics = app.add_subcommand("metrics", "Recompute the summary of a trajectory log");
  metrics->add_option("log", metrics_log, "Trajectory CSV")->required();

  std::string mc_config;
  std::optional<std::string> mc_out;
  unsigned mc_threads = 0;
  auto* montecarlo = app.add_subcommand("montecarlo", "Run every configured seed and aggregate");
  montecarlo->add_option("config", mc_config, "Scenario file")->required();
  montecarlo->add_option("--out", mc_out, "Output directory (default: config output_dir)");
  montecarlo->add_option("--threads", mc_threads, "Worker threads (0 = all cores)");

  std::string sweep_in;
  std::string cloud_out;
  auto* lrf = app.add_subcommand("lrf-project", "Convert an LRF sweep into a point cloud");
  lrf->add_option("sweep", sweep_in, "Input sweep: alpha_deg beta_deg range_m per line")
      ->required();
  lrf->add_option("cloud", cloud_out, "Output cloud: x y z per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) {
      std::optional<fs::path> out;
      if (sim_out) out = *sim_out;
      return cmd_simulate(sim_config, sim_seed, out);
    }
    if (*metrics) return cmd_metrics(metrics_log);
    if (*montecarlo) {
      std::optional<fs::path> out;
      if (mc_out) out = *mc_out;
      return cmd_montecarlo(mc_config, out, mc_threads);
    }
    if (*lrf) return cmd_lrf_project(sweep_in, cloud_out);
  } catch (const ddloc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ddloc::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ddloc::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
