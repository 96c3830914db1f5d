#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddloc/ekf.hpp"
#include "ddloc/kinematics.hpp"
#include "ddloc/noise_models.hpp"
#include "ddloc/sensor_sim.hpp"

namespace ddloc {

/// Invalid or unparsable scenario setting; field() names the key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class PathShape { RoundedRectangle, Waypoints };

struct ScenarioConfig {
  RobotGeometry geometry = RobotGeometry::reference_robot();
  SimParams sim;
  ControllerParams controller;

  PathShape path = PathShape::RoundedRectangle;
  double rect_width = 4.0;
  double rect_height = 3.0;
  double corner_radius = 0.5;
  double arc_step = deg_to_rad(15.0);
  std::vector<Waypoint> waypoints;
  bool has_start = false;
  Pose start;

  double duration = 60.0;
  ProcessNoiseParams process_noise{0.01};
  bool with_ekf = true;
  std::size_t r_window = 50;
  MeasurementNoise r_floor = default_noise_floor();
  double initial_variance = 1e-6;

  std::filesystem::path output_dir = ".";
  std::vector<std::uint64_t> seeds{1};

  /// Throws ConfigError on the first inconsistent field.
  void validate() const;

  std::vector<Waypoint> plan() const;
  Pose start_pose() const;
  std::size_t tick_count() const;
};

/// Parses "key = value" lines; '#' starts a comment. Relative output_dir
/// values are kept as written.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Accepts "1,2,5" and inclusive ranges such as "1-100" (mixable).
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace ddloc
