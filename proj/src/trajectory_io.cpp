#include "ddloc/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace ddloc {

namespace {

constexpr std::array<const char*, 19> kColumns = {
    "t",     "x_true", "y_true", "th_true", "x_odo",  "y_odo",  "th_odo",
    "x_ekf", "y_ekf",  "th_ekf", "p11",     "p22",    "p33",    "dx_odo",
    "dy_odo", "dth_odo", "dx_ekf", "dy_ekf", "dth_ekf"};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& text, std::size_t line, const char* column) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("bad number '") + text + "' in column " + column);
  }
  return v;
}

void write_metrics_fields(std::ostream& out, const EstimatorMetrics& m) {
  out << format_number(m.rms_x) << ',' << format_number(m.rms_y) << ','
      << format_number(m.rms_theta) << ',' << format_number(m.rms_position) << ','
      << format_number(m.max_position) << ',' << format_number(m.final_position) << ','
      << format_number(m.final_theta);
}

constexpr const char* kMetricColumns =
    "rms_x,rms_y,rms_theta,rms_position,max_position,final_position,final_theta";

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  std::array<char, 32> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.9g", v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    out << (i ? "," : "") << kColumns[i];
  }
  out << '\n';
  for (const LogRow& r : log.rows) {
    out << format_number(r.t) << ',' << format_number(r.truth.x()) << ','
        << format_number(r.truth.y()) << ',' << format_number(r.truth.theta()) << ','
        << format_number(r.odometry.x()) << ',' << format_number(r.odometry.y()) << ','
        << format_number(r.odometry.theta()) << ',';
    if (r.ekf) {
      out << format_number(r.ekf->pose.x()) << ',' << format_number(r.ekf->pose.y()) << ','
          << format_number(r.ekf->pose.theta()) << ',' << format_number(r.ekf->p_diag(0)) << ','
          << format_number(r.ekf->p_diag(1)) << ',' << format_number(r.ekf->p_diag(2)) << ',';
    } else {
      out << ",,,,,,";
    }
    out << format_number(r.odometry_dev.dx) << ',' << format_number(r.odometry_dev.dy) << ','
        << format_number(r.odometry_dev.dtheta) << ',';
    if (r.ekf) {
      out << format_number(r.ekf->dev.dx) << ',' << format_number(r.ekf->dev.dy) << ','
          << format_number(r.ekf->dev.dtheta);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

TrajectoryLog read_trajectory_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, ',');
  if (header.size() != kColumns.size() ||
      !std::equal(header.begin(), header.end(), kColumns.begin())) {
    throw ParseError(1, "unexpected header");
  }

  TrajectoryLog log;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != kColumns.size()) {
      throw ParseError(line_no, "expected " + std::to_string(kColumns.size()) + " fields, got " +
                                    std::to_string(f.size()));
    }
    auto num = [&](std::size_t i) { return to_double(f[i], line_no, kColumns[i]); };
    const bool has_ekf = !f[7].empty();
    if (first) {
      log.with_ekf = has_ekf;
      first = false;
    } else if (has_ekf != log.with_ekf) {
      throw ParseError(line_no, "filter columns present on some rows only");
    }

    LogRow row;
    row.t = num(0);
    row.truth = Pose(num(1), num(2), num(3));
    row.odometry = Pose(num(4), num(5), num(6));
    row.odometry_dev = {num(13), num(14), num(15)};
    if (has_ekf) {
      EkfColumns ekf;
      ekf.pose = Pose(num(7), num(8), num(9));
      ekf.p_diag = Eigen::Vector3d(num(10), num(11), num(12));
      ekf.dev = {num(16), num(17), num(18)};
      row.ekf = ekf;
    }
    if (!log.rows.empty() && !(row.t > log.rows.back().t)) {
      throw ParseError(line_no, "time column is not strictly increasing");
    }
    log.rows.push_back(row);
  }
  return log;
}

TrajectoryLog as_written(const TrajectoryLog& log) {
  std::stringstream buf;
  write_trajectory_csv(buf, log);
  TrajectoryLog out = read_trajectory_csv(buf);
  out.with_ekf = log.with_ekf;
  return out;
}

void write_summary_csv(std::ostream& out, const RunSummary& summary) {
  out << "estimator," << kMetricColumns << '\n';
  out << "odometry,";
  write_metrics_fields(out, summary.odometry);
  out << '\n';
  if (summary.ekf) {
    out << "ekf,";
    write_metrics_fields(out, *summary.ekf);
    out << '\n';
  }
}

void write_montecarlo_runs_csv(std::ostream& out, const MonteCarloResult& result) {
  out << "seed,status,estimator," << kMetricColumns << ",error\n";
  for (const SeedOutcome& run : result.runs) {
    if (!run.summary) {
      std::string msg = run.error;
      for (char& c : msg) {
        if (c == ',' || c == '\n') c = ' ';
      }
      out << run.seed << ",failed,,,,,,,,," << msg << '\n';
      continue;
    }
    out << run.seed << ",ok,odometry,";
    write_metrics_fields(out, run.summary->odometry);
    out << ",\n";
    if (run.summary->ekf) {
      out << run.seed << ",ok,ekf,";
      write_metrics_fields(out, *run.summary->ekf);
      out << ",\n";
    }
  }
}

void write_montecarlo_summary_csv(std::ostream& out, const MonteCarloResult& result) {
  out << "statistic,estimator,runs," << kMetricColumns << '\n';
  auto emit = [&](const char* name, const std::optional<AggregateMetrics>& agg) {
    if (!agg) return;
    out << "median," << name << ',' << result.completed << ',';
    write_metrics_fields(out, agg->median);
    out << "\nmean," << name << ',' << result.completed << ',';
    write_metrics_fields(out, agg->mean);
    out << '\n';
  };
  emit("odometry", result.odometry);
  emit("ekf", result.ekf);
}

std::vector<lrf::ScanPlane> read_sweep(std::istream& in) {
  std::vector<lrf::ScanPlane> sweep;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 3) {
      throw ParseError(line_no, "expected 'alpha_deg beta_deg range_m', got " +
                                    std::to_string(tokens.size()) + " fields");
    }
    const double alpha = deg_to_rad(to_double(tokens[0], line_no, "alpha_deg"));
    const double beta = deg_to_rad(to_double(tokens[1], line_no, "beta_deg"));
    const double range = to_double(tokens[2], line_no, "range_m");
    if (sweep.empty() || sweep.back().alpha != alpha) sweep.push_back({alpha, {}});
    sweep.back().beams.push_back({beta, range});
  }
  return sweep;
}

void write_cloud(std::ostream& out, const lrf::Cloud& cloud) {
  for (const lrf::Point3& p : cloud.points) {
    out << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z) << '\n';
  }
}

}  // namespace ddloc
