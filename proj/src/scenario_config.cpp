#include "ddloc/scenario_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ddloc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "expected true/false, got '" + text + "'");
}

std::vector<Waypoint> parse_waypoints(const std::string& text) {
  std::vector<Waypoint> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    std::istringstream pair(item);
    std::string xs, ys, extra;
    if (!(pair >> xs >> ys) || (pair >> extra)) {
      throw ConfigError("waypoints", "expected 'x y' pairs separated by ';', got '" + item + "'");
    }
    out.push_back({parse_double("waypoints", xs), parse_double("waypoints", ys)});
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(parse_unsigned("seeds", item));
      continue;
    }
    const std::uint64_t lo = parse_unsigned("seeds", trim(item.substr(0, dash)));
    const std::uint64_t hi = parse_unsigned("seeds", trim(item.substr(dash + 1)));
    if (hi < lo) throw ConfigError("seeds", "descending range '" + item + "'");
    if (hi - lo >= 1'000'000) throw ConfigError("seeds", "range too large '" + item + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  return seeds;
}

void ScenarioConfig::validate() const {
  auto wrap = [](const char* field, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(field, e.what());
    }
  };
  // Parameter structs report "member: reason"; name the config key instead.
  auto wrap_params = [](auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      const auto colon = msg.find(':');
      if (colon == std::string::npos) throw ConfigError("config", msg);
      std::string key = msg.substr(0, colon);
      if (key == "compass_sigma" || key == "compass_quantum" || key == "heading_deadband") {
        key += "_deg";
      }
      const auto reason = msg.find_first_not_of(' ', colon + 1);
      throw ConfigError(key, reason == std::string::npos ? msg : msg.substr(reason));
    }
  };
  wrap_params([&] { sim.validate(); });
  wrap_params([&] { controller.validate(); });
  if (!(duration > 0.0)) throw ConfigError("duration", "must be > 0");
  if (duration / sim.dt_sensor > 1e8) throw ConfigError("duration", "too many ticks");
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (r_window == 0) throw ConfigError("r_window", "must be >= 1");
  if (!(initial_variance >= 0.0)) throw ConfigError("initial_variance", "must be >= 0");
  if (!(r_floor.r11 >= 0.0)) throw ConfigError("r11_floor", "must be >= 0");
  if (!(r_floor.r22 >= 0.0)) throw ConfigError("r22_floor", "must be >= 0");
  if (!(r_floor.r33 >= 0.0)) throw ConfigError("r33_floor_deg", "must be >= 0");
  if (path == PathShape::Waypoints && waypoints.empty()) {
    throw ConfigError("waypoints", "path = waypoints needs at least one waypoint");
  }
  if (path == PathShape::RoundedRectangle) {
    wrap("path", [&] { (void)rounded_rectangle_plan(rect_width, rect_height, corner_radius,
                                                     arc_step); });
  }
}

std::vector<Waypoint> ScenarioConfig::plan() const {
  if (path == PathShape::Waypoints) return waypoints;
  return rounded_rectangle_plan(rect_width, rect_height, corner_radius, arc_step);
}

Pose ScenarioConfig::start_pose() const {
  if (has_start || path == PathShape::Waypoints) return start;
  return Pose(corner_radius, 0.0, 0.0);
}

std::size_t ScenarioConfig::tick_count() const {
  return static_cast<std::size_t>(std::llround(duration / sim.dt_sensor));
}

ScenarioConfig parse_scenario(std::istream& in) {
  ScenarioConfig cfg;
  double wheel_radius = cfg.geometry.wheel_radius();
  double track_width = cfg.geometry.track_width();
  double start_x = 0.0, start_y = 0.0, start_heading = 0.0;

  using Setter = std::function<void(const std::string& key, const std::string& value)>;
  auto number = [](double& slot) {
    return Setter([&slot](const std::string& k, const std::string& v) { slot = parse_double(k, v); });
  };
  auto degrees = [](double& slot) {
    return Setter([&slot](const std::string& k, const std::string& v) {
      slot = deg_to_rad(parse_double(k, v));
    });
  };
  auto integer = [](int& slot) {
    return Setter([&slot](const std::string& k, const std::string& v) {
      const std::uint64_t n = parse_unsigned(k, v);
      if (n > 1'000'000) throw ConfigError(k, "value too large");
      slot = static_cast<int>(n);
    });
  };
  auto start_field = [&cfg](double& slot, bool in_degrees) {
    return Setter([&cfg, &slot, in_degrees](const std::string& k, const std::string& v) {
      slot = parse_double(k, v);
      if (in_degrees) slot = deg_to_rad(slot);
      cfg.has_start = true;
    });
  };

  const std::map<std::string, Setter> setters = {
      {"wheel_radius", number(wheel_radius)},
      {"track_width", number(track_width)},
      {"dt_sensor", number(cfg.sim.dt_sensor)},
      {"dt_fine", number(cfg.sim.dt_fine)},
      {"encoder_cpr", integer(cfg.sim.encoder_cpr)},
      {"quad_decode_factor", integer(cfg.sim.quad_decode_factor)},
      {"compass_sigma_deg", degrees(cfg.sim.compass_sigma)},
      {"compass_quantum_deg", degrees(cfg.sim.compass_quantum)},
      {"speed_ripple_frac", number(cfg.sim.speed_ripple_frac)},
      {"slip_delta", number(cfg.sim.slip_delta)},
      {"straight_speed", number(cfg.controller.straight_speed)},
      {"turn_speed", number(cfg.controller.turn_speed)},
      {"capture_radius", number(cfg.controller.capture_radius)},
      {"heading_deadband_deg", degrees(cfg.controller.heading_deadband)},
      {"path",
       [&cfg](const std::string& k, const std::string& v) {
         if (v == "rounded_rectangle") {
           cfg.path = PathShape::RoundedRectangle;
         } else if (v == "waypoints") {
           cfg.path = PathShape::Waypoints;
         } else {
           throw ConfigError(k, "expected rounded_rectangle or waypoints, got '" + v + "'");
         }
       }},
      {"rect_width", number(cfg.rect_width)},
      {"rect_height", number(cfg.rect_height)},
      {"corner_radius", number(cfg.corner_radius)},
      {"arc_step_deg", degrees(cfg.arc_step)},
      {"waypoints",
       [&cfg](const std::string&, const std::string& v) { cfg.waypoints = parse_waypoints(v); }},
      {"start_x", start_field(start_x, false)},
      {"start_y", start_field(start_y, false)},
      {"start_heading_deg", start_field(start_heading, true)},
      {"duration", number(cfg.duration)},
      {"delta",
       [&cfg](const std::string& k, const std::string& v) {
         const double d = parse_double(k, v);
         if (d < 0.0) throw ConfigError(k, "must be >= 0");
         cfg.process_noise = ProcessNoiseParams(d);
       }},
      {"with_ekf",
       [&cfg](const std::string& k, const std::string& v) { cfg.with_ekf = parse_bool(k, v); }},
      {"r_window",
       [&cfg](const std::string& k, const std::string& v) {
         cfg.r_window = static_cast<std::size_t>(parse_unsigned(k, v));
       }},
      {"r11_floor", number(cfg.r_floor.r11)},
      {"r22_floor", number(cfg.r_floor.r22)},
      {"r33_floor_deg",
       [&cfg](const std::string& k, const std::string& v) {
         const double s = deg_to_rad(parse_double(k, v));
         cfg.r_floor.r33 = s * s;
       }},
      {"initial_variance", number(cfg.initial_variance)},
      {"output_dir", [&cfg](const std::string&, const std::string& v) { cfg.output_dir = v; }},
      {"seeds",
       [&cfg](const std::string&, const std::string& v) { cfg.seeds = parse_seed_list(v); }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError(key, "unknown key on line " + std::to_string(line_no));
    }
    it->second(key, value);
  }

  try {
    cfg.geometry = RobotGeometry(wheel_radius, track_width);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(wheel_radius > 0.0 ? "track_width" : "wheel_radius", e.what());
  }
  if (cfg.has_start) cfg.start = Pose(start_x, start_y, start_heading);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot open " + file.string());
  return parse_scenario(in);
}

}  // namespace ddloc
