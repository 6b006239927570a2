#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "onsetbench/deterministic.hpp"
#include "onsetbench/probabilistic.hpp"

namespace onsetbench {

/// Named set of evaluation years (may be non-contiguous).
struct PeriodSpec {
  std::string name;
  std::vector<int> years;
};

/// recent 2019-2024; extended 1965-1978 + 2019-2024; all 1965-2024;
/// common 2004-2021.
std::vector<PeriodSpec> standard_periods();

struct RegionDefinition {
  std::string name;
  std::optional<LatLonBox> box;
  double min_land = 0.5;
  std::vector<Eigen::Index> cells;
};

struct ObservationEntry {
  std::filesystem::path path;
  std::string variable = "rain";
  Units units = Units::MillimetresPerDay;
  YearRange years;
  double resolution_deg = 1.0;
  bool mask_required = false;
  std::optional<std::filesystem::path> land_mask;
};

struct ModelEntry {
  std::string name;
  int ensemble_size = 1;
  std::vector<int> years;
  /// Years the model saw in training or fine-tuning (flagged in reports).
  std::vector<int> training_years;
  double resolution_deg = 1.0;
  bool mask_required = false;
  std::optional<std::filesystem::path> land_mask;
  /// Path template with {model}, {init} (YYYY-MM-DD) and {member} fields.
  std::string forecast_path;
  /// Explicit initialization dates; empty means the default schedule.
  std::vector<CalendarDate> init_dates;
};

struct DatasetRegistry {
  ObservationEntry observations;
  std::vector<ModelEntry> models;

  const ModelEntry& model(const std::string& name) const;
};

struct WindFields {
  std::filesystem::path u200;
  std::filesystem::path u850;
  std::vector<int> reference_years;
};

struct EvaluationConfig {
  RegularGrid grid;
  std::vector<PeriodSpec> periods;
  std::vector<RegionDefinition> regions;
  std::vector<ForecastWindow> windows;
  YearRange climatology_years;
  YearRange threshold_years;
  std::optional<std::filesystem::path> threshold_file;
  ScheduleRule schedule;
  MonthDay mok_median = kMokMedian;
  int bin_width = 5;
  int reliability_bins = 10;
  TieRule auc_ties = TieRule::Half;
  bool count_post_onset_inits = false;
  bool climatology_leave_one_out = false;
  std::optional<WindFields> wind;

  const PeriodSpec& period(const std::string& name) const;
  const RegionDefinition& region(const std::string& name) const;
  const ForecastWindow& window(const std::string& name) const;
};

struct LoadedConfig {
  EvaluationConfig evaluation;
  DatasetRegistry registry;
  std::filesystem::path base_dir;
  /// FNV-1a 64 of the raw config bytes, hex.
  std::string hash;
};

/// Parses and validates a JSON config; relative paths resolve against
/// `base_dir`. Unknown keys are rejected.
LoadedConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
LoadedConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& bytes);

/// Expands {model}, {init} and {member} in a forecast path template.
std::string expand_forecast_path(const std::string& pattern, const std::string& model,
                                 const CalendarDate& init, int member);

}  // namespace onsetbench
