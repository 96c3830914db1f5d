#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddloc/kinematics.hpp"

namespace ddloc::lrf {

inline constexpr double kMinRange = 0.04;              // m
inline constexpr double kMaxRange = 80.0;              // m
inline constexpr double kMaxBearing = kPi / 2.0;       // 180 deg horizontal field
inline constexpr double kMaxPitch = deg_to_rad(25.0);  // 25 deg vertical field

class OutOfRange : public std::invalid_argument {
 public:
  explicit OutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

/// One beam: pitch of the scan plane, bearing inside the plane, range.
struct LrfSample {
  double alpha = 0.0;  // rad
  double beta = 0.0;   // rad
  double range = 0.0;  // m
};

/// Sensor frame: x forward, y left, z up.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

/// Throws OutOfRange describing the first violated bound.
void validate(const LrfSample& s);

/// The scan plane is pitched about the sensor y axis:
///   p = range * (cos(alpha) cos(beta), sin(beta), sin(alpha) cos(beta)).
Point3 project(const LrfSample& s);

/// Inverse of project. Throws OutOfRange for points outside the range
/// limits or the field of view.
LrfSample unproject(const Point3& p);

struct Beam {
  double beta = 0.0;
  double range = 0.0;
};

struct ScanPlane {
  double alpha = 0.0;
  std::vector<Beam> beams;
};

struct Cloud {
  std::vector<Point3> points;
  std::size_t rejected = 0;
};

/// Projects every beam in order; invalid beams are dropped and counted.
Cloud sweep_to_cloud(const std::vector<ScanPlane>& sweep);

}  // namespace ddloc::lrf
