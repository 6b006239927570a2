#include <filesystem>

#include "json.hpp"
#include "onsetbench/config.hpp"
#include "onsetbench/io.hpp"
#include "onsetbench/synthetic.hpp"

namespace onsetbench {

namespace {

constexpr const char* kForecastPattern = "forecasts/{model}/{init}_m{member}.gsf";

void write_runs(const std::filesystem::path& dir, const ForecastSet& set, int copies) {
  for (const auto& [init, runs] : set.runs) {
    int m = 0;
    for (int c = 0; c < copies; ++c) {
      for (const auto& run : runs) {
        const std::filesystem::path p = dir / expand_forecast_path(kForecastPattern, set.model, init, m++);
        std::filesystem::create_directories(p.parent_path());
        write_grid_series(run, p, "rain");
      }
    }
  }
}

}  // namespace

std::filesystem::path write_synthetic_archive(const std::filesystem::path& dir, const RegularGrid& grid,
                                              const SyntheticArchiveOptions& o) {
  if (o.forecast_years.empty() || !o.years.contains(o.forecast_years.first) ||
      !o.years.contains(o.forecast_years.last)) {
    throw Error(ErrorKind::InvalidArgument, "forecast years must lie inside the archive years");
  }
  if (o.perfect_members < 1) throw Error(ErrorKind::InvalidArgument, "perfect model needs a member");
  std::filesystem::create_directories(dir);
  const auto archive = generate_archive(o.season, grid, o.years);
  write_grid_series(archive.rain, dir / "rain.gsf", "rain");

  const InitializationSchedule schedule;
  for (int y : o.forecast_years.years()) {
    const auto inits = schedule.dates(y);
    write_runs(dir, replay_observations(archive.rain, inits, o.noisy.horizon_days, "perfect"), o.perfect_members);
    write_runs(dir, generate_ensemble(o.noisy, o.season, archive.truth, grid, inits, "noisy"), 1);
  }

  using nlohmann::json;
  auto edges = [](const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); };
  const json years = json::array({json::array({o.years.first, o.years.last})});
  const json fyears = json::array({json::array({o.forecast_years.first, o.forecast_years.last})});
  json cfg = {
      {"schema_version", 1},
      {"grid", {{"lat_edges", edges(grid.lat_edges())}, {"lon_edges", edges(grid.lon_edges())}}},
      {"observations", {{"path", "rain.gsf"}, {"variable", "rain"}, {"units", "mm/day"}, {"years", years}}},
      {"models",
       json::array({{{"name", "perfect"},
                     {"ensemble_size", o.perfect_members},
                     {"years", fyears},
                     {"forecast_path", kForecastPattern}},
                    {{"name", "noisy"},
                     {"ensemble_size", o.noisy.members},
                     {"years", fyears},
                     {"forecast_path", kForecastPattern}}})},
      {"periods", json::array({{{"name", "recent"}, {"years", fyears}}})},
      {"climatology_years", years},
  };
  const auto path = dir / "config.json";
  write_text_file(path, cfg.dump(2) + "\n");
  return path;
}

}  // namespace onsetbench
