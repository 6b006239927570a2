#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "onsetbench/climatology.hpp"
#include "onsetbench/onset.hpp"

namespace onsetbench {

/// Lead-day span scored for onset, the timing tolerance for a hit, and the
/// forecast length needed to complete a 5-day spell at the last lead.
struct ForecastWindow {
  std::string name;
  int first_lead = 1;
  int last_lead = 15;
  int tolerance = 3;

  int required_days() const { return last_lead + kSpellDays - 1; }

  static ForecastWindow medium() { return {"medium", 1, 15, 3}; }
  static ForecastWindow subseasonal() { return {"subseasonal", 16, 30, 5}; }
  static ForecastWindow by_name(std::string_view name);
};

/// Twice-weekly (Monday/Thursday by default) initializations from May 2
/// through September 30.
struct ScheduleRule {
  MonthDay start = kScheduleStart;
  MonthDay end = kSeasonEnd;
  std::vector<unsigned> weekdays = {1, 4};  // 0 = Sunday
};

class InitializationSchedule {
 public:
  InitializationSchedule() = default;
  explicit InitializationSchedule(ScheduleRule rule) : rule_(std::move(rule)) {}

  /// Replaces the generated dates of `year` with an explicit list.
  void set_dates(int year, std::vector<CalendarDate> dates);
  std::vector<CalendarDate> dates(int year) const;

 private:
  ScheduleRule rule_;
  std::map<int, std::vector<CalendarDate>> explicit_;
};

/// One model's runs for a set of initializations: per init, one series per
/// ensemble member covering at least lead days 1..N on the evaluation grid.
struct ForecastSet {
  std::string model;
  int ensemble_size = 1;
  std::map<CalendarDate, std::vector<FieldSeries<float>>> runs;
};

enum class Outcome { TruePositive, FalsePositive, TrueNegative, FalseNegative };
std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view s);

struct Classification {
  Outcome outcome = Outcome::TrueNegative;
  std::optional<long> abs_error;
};

struct LedgerRow {
  Eigen::Index cell = 0;
  int year = 0;
  CalendarDate init;
  std::string window;
  Outcome outcome = Outcome::TrueNegative;
  std::optional<long> abs_error;
  std::optional<CalendarDate> predicted;
  std::optional<CalendarDate> observed;
  /// Observed onset lies inside this initialization's lead-day window.
  bool onset_in_window = false;
  /// Initialization falls after the last one scored against this year's onset.
  bool after_onset = false;
};

using Ledger = std::vector<LedgerRow>;

/// Predicted onset from one member's forecast: the first wet spell whose start
/// lies in the window's lead days, after the MOK reference and no later than
/// September 30. `rain` must cover lead days 1..window.required_days().
std::optional<CalendarDate> extract_forecast_onset(const RainSeries& rain,
                                                   const CalendarDate& init,
                                                   const ForecastWindow& window, double threshold,
                                                   MonthDay mok_median = kMokMedian);

/// Decision table: a prediction within the tolerance of the observed onset is
/// a TP, any other prediction an FP; no prediction is FN when the onset falls
/// in lead days 1..last_lead and TN otherwise.
Classification classify(std::optional<CalendarDate> predicted,
                        std::optional<CalendarDate> observed, const CalendarDate& init,
                        const ForecastWindow& window);

/// Ensemble consensus: mean member onset (rounded half-up) when at least half
/// of the members predict one, otherwise none.
std::optional<CalendarDate> ensemble_reduce(std::span<const std::optional<CalendarDate>> members);

/// Predicted onset for an initialization; throws InsufficientData when the
/// forecast cannot be evaluated.
using OnsetForecaster = std::function<std::optional<CalendarDate>(const CalendarDate& init)>;

struct EvaluationOptions {
  MonthDay mok_median = kMokMedian;
  /// Keep scoring initializations after the observed onset (FAR/TN only).
  bool count_post_onset_inits = false;
};

struct SkippedInit {
  Eigen::Index cell = 0;
  CalendarDate init;
  std::string reason;
};

struct YearEvaluation {
  Ledger rows;
  std::optional<double> mae;
  /// True when the year has an observed onset and was scored at least once.
  bool total_miss_eligible = false;
  bool any_onset_forecast = false;
  std::vector<SkippedInit> skipped;
};

/// Scores initializations of one season in order, stopping at the last one
/// whose window can still contain the observed onset (init + first_lead <=
/// onset). Seasons without an observed onset run through the whole schedule.
YearEvaluation evaluate_year(const OnsetForecaster& forecaster, Eigen::Index cell, int year,
                             std::span<const CalendarDate> inits, const ForecastWindow& window,
                             std::optional<CalendarDate> observed,
                             const EvaluationOptions& options = {});

/// `evaluate_year` with onsets extracted from every member of `model` at
/// `cell` and reduced with `ensemble_reduce`.
YearEvaluation evaluate_year(const ForecastSet& model, Eigen::Index cell, int year,
                             std::span<const CalendarDate> inits, const ForecastWindow& window,
                             std::optional<CalendarDate> observed, double threshold,
                             const EvaluationOptions& options = {});

/// Operational climatological baseline: the rounded climatological mean date
/// when it falls in the window (and after the MOK reference), else none.
OnsetForecaster climatology_forecaster(const OnsetClimatology& clim, Eigen::Index cell,
                                       const ForecastWindow& window,
                                       MonthDay mok_median = kMokMedian);

/// Observations replayed as a forecast.
OnsetForecaster observation_forecaster(const RainSeries& obs, const ForecastWindow& window,
                                       double threshold, MonthDay mok_median = kMokMedian);

struct CellScores {
  Eigen::Index cell = 0;
  std::optional<double> mae;
  std::optional<double> far;
  std::optional<double> mr;
  std::optional<double> total_miss;
};

struct DeterministicScores {
  std::optional<double> mae;
  std::optional<double> mae_se;
  std::optional<double> far;
  std::optional<double> mr;
  std::optional<double> total_miss;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long onsets_in_window = 0;
  long cell_years = 0;
  long missed_cell_years = 0;
  std::vector<CellScores> cells;
};

/// Mean absolute error per (cell, year) over rows with a prediction that
/// precede the onset.
std::map<std::pair<Eigen::Index, int>, double> per_year_mae(std::span<const LedgerRow> ledger);

/// FAR = FP/(FP+TN), MR = FN/(observed onsets in window), MAE as the mean of
/// per-year MAEs with standard error over cell-years, and the total-miss
/// fraction of cell-years. Restricted to `region` when given. Zero
/// denominators leave the score unset.
DeterministicScores aggregate_scores(std::span<const LedgerRow> ledger,
                                     const RegionSpec* region = nullptr);

}  // namespace onsetbench
