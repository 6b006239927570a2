// Observation-only criteria on the IMD gridded rainfall archive (1901-2024).
// ONSETBENCH_IMD_GSF names the archive as a grid-series file (see
// tools/nc_to_gsf.py); without it the binary reports SKIP and exits 77.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "onsetbench/io.hpp"
#include "onsetbench/pipeline.hpp"
#include "onsetbench/report.hpp"
#include "onsetbench/synthetic.hpp"

using namespace onsetbench;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s %s %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string edges_json(const Eigen::VectorXd& e) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s + "]";
}

// Mean and SE of the fixed-climatology error over the CMZ cells.
std::pair<double, double> cmz_mae(const std::vector<FixedClimError>& errs, const RegionSpec& cmz) {
  double s = 0, s2 = 0, n = 0;
  for (const auto& e : errs) {
    if (std::find(cmz.cells().begin(), cmz.cells().end(), e.cell) == cmz.cells().end()) continue;
    s += static_cast<double>(e.abs_error);
    s2 += static_cast<double>(e.abs_error * e.abs_error);
    ++n;
  }
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) * n / (n - 1) / n)};
}

std::optional<Eigen::Index> cell_at(const RegularGrid& g, double lat, double lon) {
  for (Eigen::Index i = 0; i < g.n_lat(); ++i) {
    if (lat < g.lat_edges()[i] || lat >= g.lat_edges()[i + 1]) continue;
    for (Eigen::Index j = 0; j < g.n_lon(); ++j) {
      if (lon >= g.lon_edges()[j] && lon < g.lon_edges()[j + 1]) return g.cell(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace

int main() {
  const char* path = std::getenv("ONSETBENCH_IMD_GSF");
  if (!path || !*path) {
    std::printf("SKIP 1 fixed-climatology MAE over the CMZ: ONSETBENCH_IMD_GSF not set\n");
    std::printf("SKIP 2 MOK reference and northwestward progression: ONSETBENCH_IMD_GSF not set\n");
    std::printf("SKIP 3 perfect-model identity on the real archive: ONSETBENCH_IMD_GSF not set\n");
    return 77;
  }
  ::setenv("ONSETBENCH_THREADS", "1", 1);
  try {
    const auto header = read_grid_series(path);
    const auto& g = header.series.grid();
    const std::string text = std::string(R"({"observations": {"path": ")") + path +
                             R"(", "variable": ")" + header.variable + R"(", "years": [[1901, 2024]]},
       "grid": {"lat_edges": )" + edges_json(g.lat_edges()) + R"(, "lon_edges": )" + edges_json(g.lon_edges()) +
                             R"(}, "periods": ["recent", "extended"]})";
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = parse_config(text, ".");
    const auto obs = prepare_observations(cfg);
    const auto& ev = cfg.evaluation;
    const auto cmz = resolve_region(ev, ev.region("cmz"), obs.land);
    const auto [recent, recent_se] = cmz_mae(fixed_climatology_errors(obs, ev.period("recent")), cmz);
    const auto [extended, extended_se] = cmz_mae(fixed_climatology_errors(obs, ev.period("extended")), cmz);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[256];
    std::snprintf(buf, sizeof buf, "2019-2024: %.2f +- %.2f (expect 7.2 +- 1.0); 1965-78+2019-24: %.2f +- %.2f "
                  "(expect 8.0 +- 0.6); %zu CMZ cells; %.1f s single-threaded",
                  recent, recent_se, extended, extended_se, cmz.cells().size(), secs);
    report("1", std::abs(recent - 7.2) <= 1.0 && std::abs(extended - 8.0) <= 0.6 && secs < 300,
           "fixed-climatology MAE over the CMZ", buf);

    long total = 0, late = 0;
    for (const auto& r : obs.observed.records()) {
      if (!r.onset) continue;
      ++total;
      late += *r.onset > CalendarDate(r.year, 6, 2);
    }
    // South-east to north-west across the core monsoon zone.
    const double transect[][2] = {{19.5, 87.5}, {21.5, 84.5}, {23.5, 80.5}, {25.5, 76.5}, {27.5, 72.5}};
    std::vector<double> days;
    std::string list;
    for (const auto& p : transect) {
      const auto c = cell_at(g, p[0], p[1]);
      if (!c || !obs.climatology.defined(*c)) continue;
      days.push_back(obs.climatology.mean_season_day()[*c]);
      std::snprintf(buf, sizeof buf, "%s%.1f", list.empty() ? "" : " <= ", days.back());
      list += buf;
    }
    bool monotone = days.size() >= 3;
    for (std::size_t i = 1; i < days.size(); ++i) monotone = monotone && days[i] >= days[i - 1];
    std::snprintf(buf, sizeof buf, "%ld of %ld onsets after June 2; transect mean season days ", late, total);
    report("2", total > 0 && late == total && monotone, "MOK reference and northwestward progression",
           buf + list);

    const InitializationSchedule schedule;
    double worst = 0.0;
    long rows = 0;
    for (const auto& w : ev.windows) {
      const auto e = evaluate_forecasts(
          ev, obs, "observed", 1, ev.period("recent"), w,
          [&](int y) {
            const auto inits = schedule.dates(y);
            return replay_observations(obs.rain, inits, 46, "observed");
          },
          [&](int y) { return schedule.dates(y); });
      const auto s = aggregate_scores(e.ledger);
      rows += static_cast<long>(e.ledger.size());
      for (const auto& v : {s.mae, s.far, s.mr, s.total_miss}) worst = std::max(worst, std::abs(v.value_or(INFINITY)));
    }
    std::snprintf(buf, sizeof buf, "max |MAE,FAR,MR,total_miss| = %g over %ld ledger rows", worst, rows);
    report("3", worst == 0.0, "perfect-model identity on the real archive", buf);
  } catch (const std::exception& e) {
    report("1-3", false, "IMD criteria raised an error", e.what());
  }
  return failures == 0 ? 0 : 1;
}
