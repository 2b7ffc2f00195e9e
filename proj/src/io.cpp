#include "finwalk/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>

#include <json.hpp>

namespace finwalk {

namespace {

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

void write_header(std::ostream& out, const std::string& config_echo, std::uint64_t seed) {
  out << "# finwalk " << tool_version() << "\n";
  out << "# config: " << (config_echo.empty() ? "(defaults)" : config_echo) << "\n";
  out << "# seed: " << seed << "\n";
  out << "# timestamp: " << timestamp_utc() << "\n";
}

void write_paths_csv(std::ostream& out, const std::vector<WalkPath>& paths,
                     const std::string& config_echo, std::uint64_t seed) {
  write_header(out, config_echo, seed);
  const int m = paths.empty() || paths.front().records.empty()
                    ? 0
                    : static_cast<int>(paths.front().records.front().x.size());
  out << "path,kind,t,chart";
  for (int i = 0; i < m; ++i) out << ",x" << i;
  out << "\n";
  out << std::setprecision(17);
  for (const WalkPath& path : paths) {
    for (const WalkRecord& rec : path.records) {
      out << path.path_index << ',' << path_kind_name(path.kind) << ',' << rec.t << ','
          << rec.chart;
      for (int i = 0; i < m; ++i) out << ',' << rec.x[i];
      out << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const FinslerMetric& fm,
                          const std::string& config_echo, std::uint64_t seed) {
  write_header(out, config_echo, seed);
  const int m = fm.dimension();
  out << "t,chart";
  for (int i = 0; i < m; ++i) out << ",x" << i;
  for (int i = 0; i < m; ++i) out << ",y" << i;
  out << ",F\n";
  out << std::setprecision(17);
  for (const GeodesicState& s : traj.states) {
    out << s.t << ',' << s.chart;
    for (int i = 0; i < m; ++i) out << ',' << s.x[i];
    for (int i = 0; i < m; ++i) out << ',' << s.y[i];
    out << ',' << fm.value({s.chart, s.x}, s.y) << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study,
                           const std::string& config_echo, std::uint64_t seed) {
  write_header(out, config_echo, seed);
  out << "N,sup_error\n";
  out << std::setprecision(17);
  for (const ConvergenceRow& row : study.rows) out << row.N << ',' << row.sup_error << '\n';
  out << "# slope: " << study.slope << "\n";
}

void write_exit_time_csv(std::ostream& out, const ExitTimeStudy& study,
                         const std::string& config_echo, std::uint64_t seed) {
  write_header(out, config_echo, seed);
  out << "delta,t,exits,paths,p_hat,ci_lo,ci_hi,p_over_t\n";
  out << std::setprecision(12);
  for (const ExitCell& cell : study.cells) {
    out << cell.delta << ',' << cell.t << ',' << cell.exits << ',' << cell.paths << ','
        << cell.p_hat << ',' << cell.ci_lo << ',' << cell.ci_hi << ',' << cell.p_hat / cell.t
        << '\n';
  }
  out << "# slope_through_origin: " << study.slope << "\n";
}

std::string estimates_json(const std::vector<GeneratorEstimate>& estimates,
                           const std::vector<Vec>& drifts, const std::string& config_echo,
                           std::uint64_t seed) {
  nlohmann::json doc;
  doc["tool"] = std::string("finwalk ") + tool_version();
  doc["config"] = config_echo;
  doc["seed"] = seed;
  doc["timestamp"] = timestamp_utc();
  doc["estimates"] = nlohmann::json::array();

  auto matrix_rows = [](const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  auto vector_entries = [](const Vec& v) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
    return row;
  };

  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const GeneratorEstimate& est = estimates[k];
    nlohmann::json rec;
    rec["point"] = {{"chart", est.point.chart}, {"x", vector_entries(est.point.x)}};
    rec["second_order"] = matrix_rows(est.second_order);
    rec["first_order"] = vector_entries(est.first_order);
    rec["symbol"] = matrix_rows(est.symbol);
    rec["provenance"] = est.provenance;
    if (est.mc_paths > 0) {
      rec["mc_paths"] = est.mc_paths;
      rec["mc_se"] = est.mc_se;
    }
    if (k < drifts.size()) rec["drift"] = vector_entries(drifts[k]);
    doc["estimates"].push_back(rec);
  }
  return doc.dump(2);
}

void write_paths_svg(std::ostream& out, const std::vector<WalkPath>& paths, const Geometry& geo) {
  const double size = 640.0;
  const auto* sphere = dynamic_cast<const SphereAtlas*>(geo.atlas.get());

  std::vector<std::vector<std::pair<double, double>>> polylines;
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const WalkPath& path : paths) {
    std::vector<std::pair<double, double>> line;
    for (const WalkRecord& rec : path.records) {
      double px, py;
      if (sphere) {
        const Vec3 e = sphere->embed({rec.chart, rec.x});
        px = e[0];
        py = e[2];
      } else {
        px = rec.x[0];
        py = rec.x.size() > 1 ? rec.x[1] : 0.0;
      }
      lo_x = std::min(lo_x, px); hi_x = std::max(hi_x, px);
      lo_y = std::min(lo_y, py); hi_y = std::max(hi_y, py);
      line.emplace_back(px, py);
    }
    polylines.push_back(std::move(line));
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = (size - 40.0) / span;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\">\n";
  int hue = 0;
  for (const auto& line : polylines) {
    out << "<polyline fill=\"none\" stroke=\"hsl(" << hue << ",70%,45%)\" stroke-width=\"1\" points=\"";
    for (const auto& [px, py] : line)
      out << 20.0 + (px - lo_x) * scale << ',' << size - 20.0 - (py - lo_y) * scale << ' ';
    out << "\"/>\n";
    hue = (hue + 47) % 360;
  }
  out << "</svg>\n";
}

}  // namespace finwalk
