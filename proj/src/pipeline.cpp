#include "onsetbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "onsetbench/io.hpp"
#include "onsetbench/regrid.hpp"

namespace onsetbench {

namespace {

std::string join_years(const std::vector<int>& years) {
  std::string s;
  for (int y : years) s += (s.empty() ? "" : ", ") + std::to_string(y);
  return s;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// Land fraction stored as the first day of a grid series file.
CellMask read_land_mask(const std::filesystem::path& path) {
  const auto f = read_grid_series(path);
  if (f.series.n_days() < 1) throw Error(ErrorKind::MalformedFile, path.string() + " has no data");
  Eigen::VectorXd frac(f.series.n_cells());
  for (Eigen::Index c = 0; c < frac.size(); ++c) {
    const float v = f.series(0, c);
    frac[c] = is_missing(v) ? 0.0 : static_cast<double>(v);
  }
  return CellMask(f.series.grid(), std::move(frac));
}

std::optional<CellMask> source_mask(bool required, const std::optional<std::filesystem::path>& path,
                                    const RegularGrid& grid, const std::string& what) {
  if (!required) return std::nullopt;
  if (!path) throw Error(ErrorKind::ConfigError, what + " requires a land mask but none is configured");
  CellMask m = read_land_mask(*path);
  if (!(m.grid == grid)) {
    throw Error(ErrorKind::ShapeMismatch, what + " land mask grid differs from its data grid");
  }
  return m;
}

template <typename Scalar>
FieldSeries<Scalar> to_grid(const FieldSeries<Scalar>& src, const RegularGrid& dst,
                            const std::optional<CellMask>& mask, Units expect) {
  if (src.units() != expect) {
    throw Error(ErrorKind::UnitMismatch, "expected " + std::string(to_string(expect)) +
                                             " but file holds " + std::string(to_string(src.units())));
  }
  if (src.grid() == dst && !mask) return src;
  return regrid_conservative(src, dst, mask ? &*mask : nullptr, expect);
}

}  // namespace

std::vector<int> complete_years(const DailyFieldSeries& obs) {
  std::vector<int> out;
  if (obs.n_days() == 0) return out;
  for (int y = obs.start_date().year(); y <= obs.end_date().year(); ++y) {
    if (obs.covers(kSeasonSearchStart.in(y), date_add(kSeasonEnd.in(y), kSpellDays - 1))) out.push_back(y);
  }
  return out;
}

DailyFieldSeries load_observations(const LoadedConfig& cfg, CellMask* land_out) {
  const auto& entry = cfg.registry.observations;
  const RegularGrid& grid = cfg.evaluation.grid;
  DailyFieldSeries src;
  if (entry.path.extension() == ".csv") {
    src = read_csv_series(entry.path, grid, entry.units);
  } else {
    auto f = read_grid_series(entry.path);
    if (f.variable != entry.variable) {
      throw Error(ErrorKind::ConfigError, "observation file holds '" + f.variable + "', expected '" +
                                              entry.variable + "'");
    }
    src = f.series.cast<double>();
  }
  const auto mask = source_mask(entry.mask_required, entry.land_mask, src.grid(), "observations");
  DailyFieldSeries out = to_grid(src, grid, mask, entry.units);
  if (land_out) *land_out = CellMask(grid, remap_fraction(mask ? *mask : coverage_mask(src), grid));
  return out;
}

ObservationBundle prepare_observations(const LoadedConfig& cfg) {
  const auto& ev = cfg.evaluation;
  CellMask land;
  DailyFieldSeries rain = load_observations(cfg, &land);
  const auto years = complete_years(rain);
  if (years.empty()) throw Error(ErrorKind::InsufficientData, "observations contain no complete season");

  WetSpellThresholdMap thr = ev.threshold_file ? read_threshold_csv(*ev.threshold_file, ev.grid)
                                               : compute_wet_spell_threshold(rain, ev.threshold_years);
  std::vector<int> missing;
  for (int y : ev.climatology_years.years())
    if (!contains(years, y)) missing.push_back(y);
  if (!missing.empty()) {
    throw Error(ErrorKind::MissingData, "climatology years lack complete observations: " + join_years(missing));
  }
  OnsetTable observed = detect_onsets(rain, thr, years, ev.mok_median);
  OnsetClimatology clim = build_onset_climatology(rain, thr, ev.climatology_years.years(), ev.mok_median);
  return {std::move(rain), std::move(land), std::move(thr), std::move(observed), std::move(clim)};
}

RegionSpec resolve_region(const EvaluationConfig& ev, const RegionDefinition& def, const CellMask& land) {
  if (!def.cells.empty()) return RegionSpec(def.name, def.cells, ev.grid);
  return RegionSpec::from_box(def.name, ev.grid, *def.box, &land, def.min_land);
}

WetSpellThresholdMap read_threshold_csv(const std::filesystem::path& path, const RegularGrid& grid) {
  std::istringstream in(read_text_file(path));
  WetSpellThresholdMap out{grid, Eigen::VectorXd::Constant(grid.n_cells(), std::numeric_limits<double>::quiet_NaN())};
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line.rfind("lat_index", 0) == 0) continue;
    long i = -1, j = -1;
    double v = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> i >> c1 >> j >> c2) || c1 != ',' || c2 != ',') {
      throw Error(ErrorKind::ParseError, path.string() + " row " + std::to_string(row) + " is malformed");
    }
    std::string rest;
    std::getline(ls, rest);
    try {
      v = rest == "nan" || rest.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(rest);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, path.string() + " row " + std::to_string(row) + " has a bad value");
    }
    if (i < 0 || j < 0 || i >= grid.n_lat() || j >= grid.n_lon()) {
      throw Error(ErrorKind::OutOfRange, path.string() + " row " + std::to_string(row) + " is off the grid");
    }
    out.mm[grid.cell(i, j)] = v;
  }
  return out;
}

std::string threshold_csv(const WetSpellThresholdMap& t) {
  std::ostringstream os;
  os.precision(10);
  os << "lat_index,lon_index,threshold_mm\n";
  for (Eigen::Index c = 0; c < t.mm.size(); ++c) {
    os << t.grid.lat_index(c) << ',' << t.grid.lon_index(c) << ',';
    if (std::isnan(t.mm[c])) os << "nan"; else os << t.mm[c];
    os << '\n';
  }
  return os.str();
}

std::vector<Eigen::Index> evaluable_cells(const ObservationBundle& obs) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index c = 0; c < obs.thresholds.mm.size(); ++c) {
    if (!std::isnan(obs.thresholds.mm[c]) && obs.land.land_fraction[c] > 0.0) out.push_back(c);
  }
  return out;
}

std::vector<CalendarDate> model_inits(const EvaluationConfig& ev, const ModelEntry& model, int year) {
  if (model.init_dates.empty()) return InitializationSchedule(ev.schedule).dates(year);
  std::vector<CalendarDate> out;
  for (const auto& d : model.init_dates)
    if (d.year() == year) out.push_back(d);
  std::sort(out.begin(), out.end());
  return out;
}

ForecastSet load_model_year(const LoadedConfig& cfg, const ModelEntry& model, int year,
                            const RegularGrid& grid, std::vector<SkippedInit>* skipped) {
  ForecastSet set{model.name, model.ensemble_size, {}};
  std::optional<CellMask> mask;
  bool mask_loaded = false;
  for (const auto& init : model_inits(cfg.evaluation, model, year)) {
    std::vector<FieldSeries<float>> members;
    std::string problem;
    for (int m = 0; m < model.ensemble_size && problem.empty(); ++m) {
      std::filesystem::path p = expand_forecast_path(model.forecast_path, model.name, init, m);
      if (p.is_relative()) p = cfg.base_dir / p;
      if (!std::filesystem::exists(p)) {
        problem = "missing forecast file " + p.string();
        break;
      }
      auto f = read_grid_series(p);
      if (f.series.start_date() > date_add(init, 1)) {
        throw Error(ErrorKind::MalformedFile, p.string() + " starts after lead day 1");
      }
      if (!mask_loaded) {
        mask = source_mask(model.mask_required, model.land_mask, f.series.grid(), model.name);
        mask_loaded = true;
      }
      members.push_back(to_grid(f.series, grid, mask, Units::MillimetresPerDay));
    }
    if (!problem.empty()) {
      if (skipped) skipped->push_back({-1, init, problem});
      continue;
    }
    set.runs.emplace(init, std::move(members));
  }
  return set;
}

unsigned thread_count() {
  if (const char* env = std::getenv("ONSETBENCH_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<unsigned>(n);
    throw Error(ErrorKind::ConfigError, std::string("ONSETBENCH_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct CellResult {
  Ledger rows;
  std::vector<SkippedInit> skipped;
  std::vector<ProbRecord> prob;
};

std::vector<AvailabilityNote> availability(const EvaluationConfig& ev, const std::string& name,
                                           const ModelEntry* model, const PeriodSpec& period) {
  std::vector<AvailabilityNote> out;
  std::vector<int> missing;
  for (int y : period.years) {
    AvailabilityNote n{y, false, false};
    if (model) {
      n.missing = !model->years.empty() && !contains(model->years, y);
      n.training = contains(model->training_years, y);
    } else {
      n.training = ev.climatology_years.contains(y) && !ev.climatology_leave_one_out;
    }
    if (n.missing) missing.push_back(y);
    out.push_back(n);
  }
  if (missing.size() == period.years.size()) {
    throw Error(ErrorKind::MissingData, name + " has no forecasts for period '" + period.name +
                                            "'; missing years: " + join_years(missing));
  }
  return out;
}

}  // namespace

ModelEvaluation evaluate_forecasts(const EvaluationConfig& ev, const ObservationBundle& obs,
                                   const std::string& model, int ensemble_size,
                                   const PeriodSpec& period, const ForecastWindow& window,
                                   const std::function<ForecastSet(int year)>& load_year,
                                   const std::function<std::vector<CalendarDate>(int year)>& inits_of) {
  std::vector<int> absent;
  for (int y : period.years)
    if (!obs.observed.has_year(y)) absent.push_back(y);
  if (!absent.empty()) {
    throw Error(ErrorKind::MissingData, "observations lack complete seasons for period '" + period.name +
                                            "': " + join_years(absent));
  }
  const bool is_clim = model == "climatology";
  ModelEvaluation out{model, period.name, window, is_clim ? static_cast<int>(obs.climatology.years().size())
                                                          : ensemble_size,
                      {}, {}, {}, {}};
  const BinScheme scheme(window.last_lead, ev.bin_width);
  const ForecastWindow prob_window{window.name, 1, window.last_lead, window.tolerance};
  const EvaluationOptions opts{ev.mok_median, ev.count_post_onset_inits};
  const auto cells = evaluable_cells(obs);

  for (int year : period.years) {
    ForecastSet set;
    if (!is_clim) {
      set = load_year(year);
    }
    const auto inits = inits_of(year);
    for (const auto& init : inits) {
      if (!is_clim && !set.runs.count(init)) {
        out.skipped.push_back({-1, init, "no forecast for this initialization"});
      }
    }
    std::vector<CellResult> results(cells.size());
    parallel_for(cells.size(), [&](std::size_t k) {
      const Eigen::Index cell = cells[k];
      const double thr = obs.thresholds.mm[cell];
      const auto observed = obs.observed.at(cell, year);
      CellResult& res = results[k];
      YearEvaluation ye;
      if (is_clim) {
        ye = evaluate_year(climatology_forecaster(obs.climatology, cell, window, ev.mok_median), cell, year,
                           inits, window, observed, opts);
      } else {
        ye = evaluate_year(set, cell, year, inits, window, observed, thr, opts);
      }
      res.rows = std::move(ye.rows);
      for (auto& s : ye.skipped)
        if (is_clim || set.runs.count(s.init)) res.skipped.push_back(std::move(s));

      const std::optional<int> loo = ev.climatology_leave_one_out ? std::optional(year) : std::nullopt;
      if (!obs.climatology.defined(cell)) return;
      for (const auto& init : inits) {
        if (observed && init >= *observed) break;
        ProbForecast fc;
        if (!is_clim) {
          const auto it = set.runs.find(init);
          if (it == set.runs.end()) continue;
          std::vector<std::optional<CalendarDate>> members;
          try {
            for (const auto& run : it->second) {
              const auto series = run.cell_series(cell);
              members.push_back(extract_forecast_onset(RainSeries{run.start_date(), series}, init,
                                                       prob_window, thr, ev.mok_median));
            }
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientData) throw;
            continue;
          }
          fc = bin_member_onsets(members, init, scheme, observed);
        }
        ProbForecast cf = climatology_prob_forecast(obs.climatology, cell, init, scheme, observed, loo);
        if (is_clim) fc = cf;
        if (fc.members >= 2 && cf.members >= 2) {
          res.prob.push_back({"model", cell, year, init, std::move(fc)});
          res.prob.push_back({"climatology", cell, year, init, std::move(cf)});
        }
      }
    });
    for (auto& r : results) {
      out.ledger.insert(out.ledger.end(), r.rows.begin(), r.rows.end());
      out.skipped.insert(out.skipped.end(), r.skipped.begin(), r.skipped.end());
      out.prob.insert(out.prob.end(), std::make_move_iterator(r.prob.begin()),
                      std::make_move_iterator(r.prob.end()));
    }
  }
  return out;
}

ModelEvaluation evaluate_model(const LoadedConfig& cfg, const ObservationBundle& obs,
                               const std::string& model, const PeriodSpec& period,
                               const ForecastWindow& window) {
  const auto& ev = cfg.evaluation;
  const ModelEntry* entry = model == "climatology" ? nullptr : &cfg.registry.model(model);
  auto notes = availability(ev, model, entry, period);
  PeriodSpec present{period.name, {}};
  for (const auto& n : notes)
    if (!n.missing) present.years.push_back(n.year);

  std::vector<SkippedInit> load_skips;
  auto result = evaluate_forecasts(
      ev, obs, model, entry ? entry->ensemble_size : 1, present, window,
      [&](int year) { return load_model_year(cfg, *entry, year, ev.grid, &load_skips); },
      [&](int year) {
        return entry ? model_inits(ev, *entry, year) : InitializationSchedule(ev.schedule).dates(year);
      });
  // Missing files already surface as "no forecast" rows; keep the file names instead.
  if (!load_skips.empty()) {
    std::erase_if(result.skipped, [](const SkippedInit& s) { return s.cell == -1; });
    result.skipped.insert(result.skipped.begin(), load_skips.begin(), load_skips.end());
  }
  result.availability = std::move(notes);
  return result;
}

}  // namespace onsetbench
