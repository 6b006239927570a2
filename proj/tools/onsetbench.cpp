// onsetbench command-line driver.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "onsetbench/io.hpp"
#include "onsetbench/oracle.hpp"
#include "onsetbench/report.hpp"
#include "onsetbench/synthetic.hpp"

using namespace onsetbench;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string out = "onsetbench-out";
  std::string in;
  std::vector<std::string> periods;
  std::vector<std::string> windows;
  std::vector<std::string> models;
  std::string region;
  std::string format = "json";
  std::string variant = "mok";
  int trials = 0;
  std::uint64_t seed = 20240602;
  std::string archive;
  std::string years = "1995-2024";
};

void fail_usage(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

std::optional<std::string> region_filter(const Options& o) {
  return o.region.empty() ? std::nullopt : std::optional(o.region);
}

std::vector<PeriodSpec> selected_periods(const EvaluationConfig& ev, const Options& o) {
  if (o.periods.empty()) return ev.periods;
  std::vector<PeriodSpec> out;
  for (const auto& p : o.periods) out.push_back(ev.period(p));
  return out;
}

std::vector<ForecastWindow> selected_windows(const EvaluationConfig& ev, const Options& o) {
  if (o.windows.empty()) return ev.windows;
  std::vector<ForecastWindow> out;
  for (const auto& w : o.windows) out.push_back(ev.window(w));
  return out;
}

std::map<std::string, RegionSpec> resolve_regions(const LoadedConfig& cfg, const CellMask& land) {
  std::map<std::string, RegionSpec> out;
  for (const auto& def : cfg.evaluation.regions) out.emplace(def.name, resolve_region(cfg.evaluation, def, land));
  return out;
}

void print(const std::string& format, const json& rows) {
  if (format == "json") {
    std::cout << rows.dump(2) << '\n';
    return;
  }
  if (rows.empty()) return;
  std::vector<std::string> keys;
  for (const auto& [k, v] : rows[0].items()) keys.push_back(k);
  for (std::size_t i = 0; i < keys.size(); ++i) std::cout << (i ? "," : "") << keys[i];
  std::cout << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const auto& v = r.at(keys[i]);
      std::cout << (i ? "," : "") << (v.is_string() ? v.get<std::string>() : v.is_null() ? "" : v.dump());
    }
    std::cout << '\n';
  }
}

json opt_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(std::stod(format_number(*v))) : json(nullptr);
}

int cmd_ingest(const Options& o) {
  const auto cfg = load_config(o.config);
  CellMask land;
  const auto rain = load_observations(cfg, &land);
  std::filesystem::create_directories(o.out);
  write_grid_series(rain, std::filesystem::path(o.out) / "observations.gsf", cfg.registry.observations.variable);
  std::ostringstream lf;
  lf << "cell,lat_index,lon_index,land_fraction\n";
  for (Eigen::Index c = 0; c < land.land_fraction.size(); ++c) {
    lf << c << ',' << rain.grid().lat_index(c) << ',' << rain.grid().lon_index(c) << ','
       << format_number(land.land_fraction[c]) << '\n';
  }
  write_text_file(std::filesystem::path(o.out) / "land_fraction.csv", lf.str());
  const auto years = complete_years(rain);
  print(o.format, json::array({{{"start", rain.start_date().iso()},
                                {"end", rain.end_date().iso()},
                                {"cells", rain.n_cells()},
                                {"complete_seasons", years.size()},
                                {"config_hash", cfg.hash}}}));
  return 0;
}

int cmd_climatology(const Options& o) {
  const auto cfg = load_config(o.config);
  const auto obs = prepare_observations(cfg);
  const auto& grid = cfg.evaluation.grid;
  const std::filesystem::path out(o.out);
  std::filesystem::create_directories(out);
  write_text_file(out / "thresholds.csv", threshold_csv(obs.thresholds));

  std::ostringstream cs;
  cs << "cell,lat_index,lon_index,lat,lon,land_fraction,threshold_mm,n_onsets,mean_season_day,mean_onset\n";
  for (Eigen::Index c = 0; c < grid.n_cells(); ++c) {
    int n = 0;
    for (int y : obs.climatology.years()) n += obs.climatology.members().at(c, y).has_value();
    cs << c << ',' << grid.lat_index(c) << ',' << grid.lon_index(c) << ','
       << format_number(grid.lat_center(grid.lat_index(c))) << ','
       << format_number(grid.lon_center(grid.lon_index(c))) << ',' << format_number(obs.land.land_fraction[c])
       << ',' << (std::isnan(obs.thresholds.mm[c]) ? "" : format_number(obs.thresholds.mm[c])) << ',' << n << ',';
    if (obs.climatology.defined(c)) {
      const auto d = *obs.climatology.mean_date(c, 2001);
      cs << format_number(obs.climatology.mean_season_day()[c]) << ',' << MonthDay{d.month(), d.day()}.str();
    } else {
      cs << ',';
    }
    cs << '\n';
  }
  write_text_file(out / "climatology.csv", cs.str());

  const auto regions = resolve_regions(cfg, obs.land);
  json rows = json::array();
  EvaluationArtifacts a;
  a.grid = grid;
  for (const auto& [name, r] : regions) a.regions[name] = r.cells();
  for (const auto& p : selected_periods(cfg.evaluation, o)) {
    const auto errs = fixed_climatology_errors(obs, p);
    a.fixed_climatology.insert(a.fixed_climatology.end(), errs.begin(), errs.end());
    for (const auto& [name, r] : regions) {
      if (!o.region.empty() && name != o.region) continue;
      const std::set<Eigen::Index> in(r.cells().begin(), r.cells().end());
      double s = 0, ss = 0;
      long n = 0;
      for (const auto& e : errs) {
        if (!in.count(e.cell)) continue;
        s += static_cast<double>(e.abs_error);
        ss += static_cast<double>(e.abs_error) * static_cast<double>(e.abs_error);
        ++n;
      }
      std::optional<double> mean, se;
      if (n > 0) mean = s / static_cast<double>(n);
      if (n > 1) se = std::sqrt((ss - static_cast<double>(n) * *mean * *mean) / static_cast<double>(n - 1)) /
                      std::sqrt(static_cast<double>(n));
      rows.push_back({{"period", p.name},
                      {"region", name},
                      {"cells", r.size()},
                      {"cell_years", n},
                      {"fixed_clim_mae", opt_json(mean)},
                      {"fixed_clim_mae_se", opt_json(se)}});
    }
  }
  std::ostringstream fc;
  fc << "period,cell,year,abs_error\n";
  for (const auto& f : a.fixed_climatology) fc << f.period << ',' << f.cell << ',' << f.year << ',' << f.abs_error << '\n';
  write_text_file(out / "fixed_clim.csv", fc.str());
  print(o.format, rows);
  return 0;
}

int cmd_onset(const Options& o) {
  const auto cfg = load_config(o.config);
  const std::filesystem::path out(o.out);
  std::filesystem::create_directories(out);
  std::ostringstream os;
  long found = 0, absent = 0, undecidable = 0;
  if (o.variant == "wyi") {
    const auto& ev = cfg.evaluation;
    if (!ev.wind) throw Error(ErrorKind::ConfigError, "the wyi variant needs a 'wind' section in the config");
    const auto u200 = read_grid_series(ev.wind->u200).series.cast<double>();
    const auto u850 = read_grid_series(ev.wind->u850).series.cast<double>();
    WyiSeries wyi = compute_wyi(u200, u850);
    wyi.reference = wyi_reference(wyi, ev.wind->reference_years, ev.mok_median);
    os << "year,onset\n";
    for (int y = wyi.start.year(); y <= wyi.date_at(wyi.values.size() - 1).year(); ++y) {
      std::optional<CalendarDate> d;
      try {
        d = wyi_onset(wyi, y);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientData && e.kind() != ErrorKind::MissingData) throw;
        ++undecidable;
        continue;
      }
      (d ? found : absent) += 1;
      os << y << ',' << (d ? d->iso() : "") << '\n';
    }
  } else if (o.variant == "mok" || o.variant == "mr") {
    const auto obs = prepare_observations(cfg);
    os << "cell,year,onset,status\n";
    for (Eigen::Index c : evaluable_cells(obs)) {
      const auto series = obs.rain.cell_series(c);
      const RainSeries rain{obs.rain.start_date(), series};
      for (int y : obs.observed.years()) {
        OnsetDetection det;
        if (o.variant == "mok") {
          const auto& d = obs.observed.at(c, y);
          det = {d ? DetectionStatus::Found : DetectionStatus::Absent, d};
        } else {
          det = detect_onset_moron_robertson(rain, obs.thresholds.mm[c], kSeasonSearchStart.in(y),
                                             kSeasonEnd.in(y));
        }
        const char* status = det.status == DetectionStatus::Found    ? "found"
                             : det.status == DetectionStatus::Absent ? "absent"
                                                                     : "undecidable";
        (det.status == DetectionStatus::Found ? found : det.status == DetectionStatus::Absent ? absent : undecidable)++;
        os << c << ',' << y << ',' << (det.date ? det.date->iso() : "") << ',' << status << '\n';
      }
    }
  } else {
    fail_usage("--variant must be mok, mr or wyi");
  }
  write_text_file(out / ("onsets_" + o.variant + ".csv"), os.str());
  print(o.format, json::array({{{"variant", o.variant}, {"found", found}, {"absent", absent},
                                {"undecidable", undecidable}}}));
  return 0;
}

int cmd_evaluate(const Options& o) {
  const auto cfg = load_config(o.config);
  const auto& ev = cfg.evaluation;
  if (!o.region.empty()) (void)ev.region(o.region);
  const auto obs = prepare_observations(cfg);
  EvaluationArtifacts a;
  a.config_hash = cfg.hash;
  a.grid = ev.grid;
  a.auc_ties = ev.auc_ties;
  a.reliability_bins = ev.reliability_bins;
  for (const auto& [name, r] : resolve_regions(cfg, obs.land)) a.regions[name] = r.cells();

  std::vector<std::string> models = o.models;
  if (models.empty()) {
    for (const auto& m : cfg.registry.models) models.push_back(m.name);
    models.push_back("climatology");
  }
  const auto periods = selected_periods(ev, o);
  const auto windows = selected_windows(ev, o);
  for (const auto& p : periods) {
    const auto errs = fixed_climatology_errors(obs, p);
    a.fixed_climatology.insert(a.fixed_climatology.end(), errs.begin(), errs.end());
    for (const auto& w : windows) {
      for (const auto& m : models) a.evaluations.push_back(evaluate_model(cfg, obs, m, p, w));
    }
  }
  const std::filesystem::path out(o.out);
  write_artifacts(a, out);
  // Scores come from the persisted files so that evaluate and report agree.
  write_report(read_artifacts(out), out, parse_report_format(o.format), region_filter(o));
  std::cout << read_text_file(out / "table.md");
  return 0;
}

int cmd_report(const Options& o) {
  const std::filesystem::path in(o.in.empty() ? o.out : o.in);
  const auto a = read_artifacts(in);
  const auto written = write_report(a, o.out, parse_report_format(o.format), region_filter(o));
  std::cout << read_text_file(std::filesystem::path(o.out) / (o.format == "json" ? "scores.json" : "scores.csv"));
  return 0;
}

YearRange parse_year_range(const std::string& s) {
  const auto dash = s.find('-');
  try {
    if (dash == std::string::npos) throw std::invalid_argument(s);
    const YearRange r{std::stoi(s.substr(0, dash)), std::stoi(s.substr(dash + 1))};
    if (r.empty()) throw std::invalid_argument(s);
    return r;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "--years must look like 1995-2024, got '" + s + "'");
  }
}

int cmd_synth(const Options& o) {
  if ((o.trials > 0) == !o.archive.empty()) fail_usage("synth needs exactly one of --trials or --archive");
  if (!o.archive.empty()) {
    SyntheticArchiveOptions opts;
    opts.years = parse_year_range(o.years);
    opts.forecast_years = {std::max(opts.years.first, opts.years.last - 5), opts.years.last};
    opts.season.seed = o.seed;
    opts.season.northwest_delay_per_degree = 0.5;
    opts.season.shared_year_sd = 4.0;
    opts.season.false_start_rate = 0.3;
    opts.season.post_onset_dry_spell_prob = 0.2;
    const auto grid = RegularGrid::uniform(6.0, 38.0, 4.0, 66.0, 98.0, 4.0);
    const auto path = write_synthetic_archive(o.archive, grid, opts);
    print(o.format, json::array({{{"config", path.string()}, {"years", o.years}, {"seed", o.seed}}}));
    return 0;
  }
  const auto checks = oracle::run_cross_checks(o.trials, o.seed);
  json rows = json::array();
  bool ok = true;
  for (const auto& c : checks) {
    rows.push_back({{"check", c.name}, {"trials", c.trials}, {"max_abs_diff", c.max_abs_diff},
                    {"status", c.passed ? "PASS" : "FAIL"}});
    ok &= c.passed;
  }
  print(o.format, rows);
  return ok ? 0 : 1;
}

void error_record(const std::string& kind, const std::string& message) {
  json rec = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << rec.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monsoon onset forecast verification"};
  app.set_version_flag("--version", ONSETBENCH_VERSION);
  app.require_subcommand(1);
  Options o;
  const auto fmt = CLI::IsMember({"csv", "json"});

  auto* ingest = app.add_subcommand("ingest", "Regrid observations to the evaluation grid");
  auto* clim = app.add_subcommand("climatology", "Thresholds, onset climatology and fixed-date MAE");
  auto* onset = app.add_subcommand("onset", "Observed onsets per cell and year");
  auto* evaluate = app.add_subcommand("evaluate", "Score models against observed onsets");
  auto* report = app.add_subcommand("report", "Rebuild scores and tables from an evaluation directory");
  auto* synth = app.add_subcommand("synth", "Oracle cross-checks or a synthetic archive");

  for (auto* sub : {ingest, clim, onset, evaluate}) sub->add_option("--config", o.config, "Config file")->required();
  for (auto* sub : {ingest, clim, onset, evaluate, report}) sub->add_option("--out", o.out, "Output directory");
  for (auto* sub : {ingest, clim, onset, evaluate, report, synth})
    sub->add_option("--format", o.format, "csv or json")->check(fmt);
  for (auto* sub : {clim, evaluate}) sub->add_option("--period", o.periods, "Period name (repeatable)");
  for (auto* sub : {clim, evaluate, report}) sub->add_option("--region", o.region, "Region name");
  evaluate->add_option("--window", o.windows, "Window name (repeatable)");
  evaluate->add_option("--model", o.models, "Model name (repeatable); 'climatology' is the baseline");
  onset->add_option("--variant", o.variant, "mok, mr or wyi")->check(CLI::IsMember({"mok", "mr", "wyi"}));
  report->add_option("--in", o.in, "Evaluation directory (default: --out)");
  synth->add_option("--trials", o.trials, "Random instances per oracle cross-check")->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed, "Seed");
  synth->add_option("--archive", o.archive, "Write a synthetic archive and config here");
  synth->add_option("--years", o.years, "Archive years, e.g. 1995-2024");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("Usage", e.what());
    return 2;
  }

  try {
    if (*ingest) return cmd_ingest(o);
    if (*clim) return cmd_climatology(o);
    if (*onset) return cmd_onset(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*report) return cmd_report(o);
    if (*synth) return cmd_synth(o);
  } catch (const Error& e) {
    error_record(std::string(to_string(e.kind())), e.what());
    return e.kind() == ErrorKind::InvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    error_record("Internal", e.what());
    return 1;
  }
  return 0;
}
