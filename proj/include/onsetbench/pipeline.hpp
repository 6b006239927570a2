#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "onsetbench/climatology.hpp"
#include "onsetbench/config.hpp"
#include "onsetbench/deterministic.hpp"
#include "onsetbench/probabilistic.hpp"

namespace onsetbench {

/// Observations on the evaluation grid and everything derived from them.
struct ObservationBundle {
  DailyFieldSeries rain;
  CellMask land;
  WetSpellThresholdMap thresholds;
  /// MOK-filtered onsets for every year the record covers completely.
  OnsetTable observed;
  OnsetClimatology climatology;
};

/// Years whose April 1 .. October 4 span lies inside `obs`.
std::vector<int> complete_years(const DailyFieldSeries& obs);

/// Reads the observation file, applies the land mask if required, and
/// regrids to the evaluation grid.
DailyFieldSeries load_observations(const LoadedConfig& cfg, CellMask* land_out = nullptr);

ObservationBundle prepare_observations(const LoadedConfig& cfg);

RegionSpec resolve_region(const EvaluationConfig& ev, const RegionDefinition& def,
                          const CellMask& land);

/// Thresholds as `lat_index,lon_index,threshold_mm` rows.
WetSpellThresholdMap read_threshold_csv(const std::filesystem::path& path, const RegularGrid& grid);
std::string threshold_csv(const WetSpellThresholdMap& thresholds);

/// Cells with a defined threshold and some land.
std::vector<Eigen::Index> evaluable_cells(const ObservationBundle& obs);

/// One binned forecast with its provenance.
struct ProbRecord {
  std::string source;  // "model" or "climatology"
  Eigen::Index cell = 0;
  int year = 0;
  CalendarDate init;
  ProbForecast forecast;
};

struct AvailabilityNote {
  int year = 0;
  bool missing = false;   // no forecasts for this year
  bool training = false;  // year was seen in training
};

struct ModelEvaluation {
  std::string model;
  std::string period;
  ForecastWindow window;
  int ensemble_size = 1;
  Ledger ledger;
  std::vector<SkippedInit> skipped;
  std::vector<ProbRecord> prob;
  std::vector<AvailabilityNote> availability;
};

/// Model forecasts for the initializations of one year, regridded to `grid`.
/// Inits with any unreadable member are recorded in `skipped` and dropped.
ForecastSet load_model_year(const LoadedConfig& cfg, const ModelEntry& model, int year,
                            const RegularGrid& grid, std::vector<SkippedInit>* skipped);

std::vector<CalendarDate> model_inits(const EvaluationConfig& ev, const ModelEntry& model, int year);

/// Worker count from ONSETBENCH_THREADS (default: hardware concurrency).
unsigned thread_count();

/// Runs `fn(k)` for k in [0, n) on up to thread_count() workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Evaluates one model (or the reserved name "climatology") over a period
/// and window: deterministic ledger for every evaluable cell plus paired
/// model/climatology probabilistic forecasts for the initializations before
/// each observed onset.
ModelEvaluation evaluate_model(const LoadedConfig& cfg, const ObservationBundle& obs,
                               const std::string& model, const PeriodSpec& period,
                               const ForecastWindow& window);

/// Same loop over an in-memory forecast source (one set per year).
ModelEvaluation evaluate_forecasts(const EvaluationConfig& ev, const ObservationBundle& obs,
                                   const std::string& model, int ensemble_size,
                                   const PeriodSpec& period, const ForecastWindow& window,
                                   const std::function<ForecastSet(int year)>& load_year,
                                   const std::function<std::vector<CalendarDate>(int year)>& inits);

}  // namespace onsetbench
