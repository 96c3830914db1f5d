#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ddloc/lrf_geometry.hpp"
#include "ddloc/scenario.hpp"

namespace ddloc {

/// Malformed input file; line() is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Nine significant digits, no negative zero.
std::string format_number(double v);

/// Column order:
/// t,x_true,y_true,th_true,x_odo,y_odo,th_odo,x_ekf,y_ekf,th_ekf,p11,p22,p33,
/// dx_odo,dy_odo,dth_odo,dx_ekf,dy_ekf,dth_ekf
/// Filter columns are left empty when the filter is disabled.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
TrajectoryLog read_trajectory_csv(std::istream& in);

/// Round-trips a log through the CSV text so that metrics computed from it
/// match metrics recomputed later from the written file.
TrajectoryLog as_written(const TrajectoryLog& log);

void write_summary_csv(std::ostream& out, const RunSummary& summary);
void write_montecarlo_runs_csv(std::ostream& out, const MonteCarloResult& result);
void write_montecarlo_summary_csv(std::ostream& out, const MonteCarloResult& result);

/// One beam per line: "alpha_deg beta_deg range_m". Blank lines and '#'
/// comments are skipped; lines sharing a pitch are grouped into one plane.
std::vector<lrf::ScanPlane> read_sweep(std::istream& in);
void write_cloud(std::ostream& out, const lrf::Cloud& cloud);

}  // namespace ddloc
