#include "ddloc/lrf_geometry.hpp"

#include <cmath>
#include <sstream>

namespace ddloc::lrf {

namespace {

// Slack on the angular and range limits for values that went through
// trigonometric round trips.
constexpr double kAngleSlack = 1e-12;
constexpr double kRangeSlack = 1e-12;

std::string describe(const char* what, double value, double lo, double hi) {
  std::ostringstream os;
  os << what << " " << value << " outside [" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

double Point3::norm() const { return std::sqrt(x * x + y * y + z * z); }

void validate(const LrfSample& s) {
  if (!std::isfinite(s.alpha) || !std::isfinite(s.beta) || !std::isfinite(s.range)) {
    throw OutOfRange("non-finite LRF sample");
  }
  if (s.range < kMinRange * (1.0 - kRangeSlack) || s.range > kMaxRange * (1.0 + kRangeSlack)) {
    throw OutOfRange(describe("range", s.range, kMinRange, kMaxRange));
  }
  if (std::abs(s.beta) > kMaxBearing + kAngleSlack) {
    throw OutOfRange(describe("bearing", s.beta, -kMaxBearing, kMaxBearing));
  }
  if (s.alpha < -kAngleSlack || s.alpha > kMaxPitch + kAngleSlack) {
    throw OutOfRange(describe("pitch", s.alpha, 0.0, kMaxPitch));
  }
}

Point3 project(const LrfSample& s) {
  validate(s);
  const double planar = s.range * std::cos(s.beta);
  return {planar * std::cos(s.alpha), s.range * std::sin(s.beta), planar * std::sin(s.alpha)};
}

LrfSample unproject(const Point3& p) {
  LrfSample s;
  s.range = p.norm();
  const double planar = std::hypot(p.x, p.z);
  s.beta = std::atan2(p.y, planar);
  // On the bearing limits the pitch is unobservable; report the level plane.
  s.alpha = planar > 0.0 ? std::atan2(p.z, p.x) : 0.0;
  validate(s);
  return s;
}

Cloud sweep_to_cloud(const std::vector<ScanPlane>& sweep) {
  Cloud cloud;
  for (const ScanPlane& plane : sweep) {
    for (const Beam& beam : plane.beams) {
      try {
        cloud.points.push_back(project({plane.alpha, beam.beta, beam.range}));
      } catch (const OutOfRange&) {
        ++cloud.rejected;
      }
    }
  }
  return cloud;
}

}  // namespace ddloc::lrf
