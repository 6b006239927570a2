#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "onsetbench/regrid.hpp"

namespace onsetbench {

inline constexpr double kWetDayMm = 1.0;
inline constexpr int kSpellDays = 5;

/// Inclusive span of years.
struct YearRange {
  int first = 0;
  int last = -1;

  bool empty() const { return last < first; }
  bool contains(int y) const { return y >= first && y <= last; }
  int size() const { return empty() ? 0 : last - first + 1; }
  std::vector<int> years() const;
};

/// Daily rainfall at one location, anchored at a start date.
struct RainSeries {
  CalendarDate start;
  std::span<const double> values;

  long size() const { return static_cast<long>(values.size()); }
  CalendarDate end() const { return date_add(start, size() - 1); }
  long index_of(const CalendarDate& d) const { return date_diff(d, start); }
  bool contains(long i) const { return i >= 0 && i < size(); }
};

/// Per-cell 5-day wet-spell accumulation threshold (mm); NaN where undefined.
struct WetSpellThresholdMap {
  RegularGrid grid;
  Eigen::VectorXd mm;
};

enum class OnsetVariant { MoronRobertson, MokFiltered, Wyi };
std::string_view to_string(OnsetVariant v);

struct OnsetRecord {
  Eigen::Index cell = 0;
  int year = 0;
  std::optional<CalendarDate> onset;
  OnsetVariant variant = OnsetVariant::MokFiltered;
};

/// Onset (or absence) per cell and year.
class OnsetTable {
 public:
  OnsetTable() = default;
  OnsetTable(std::vector<int> years, Eigen::Index n_cells, OnsetVariant variant);

  const std::vector<int>& years() const { return years_; }
  Eigen::Index n_cells() const { return n_cells_; }
  OnsetVariant variant() const { return variant_; }
  bool has_year(int year) const;

  const std::optional<CalendarDate>& at(Eigen::Index cell, int year) const;
  void set(Eigen::Index cell, int year, std::optional<CalendarDate> onset);

  std::vector<OnsetRecord> records() const;

 private:
  std::size_t slot(Eigen::Index cell, int year) const;

  std::vector<int> years_;
  Eigen::Index n_cells_ = 0;
  OnsetVariant variant_ = OnsetVariant::MokFiltered;
  std::vector<std::optional<CalendarDate>> data_;
};

/// Mean 5-day accumulation over windows that start on a wet day between
/// June 1 and September 30, averaged per year and then across `years`.
/// Returns nullopt when no year has a qualifying window.
std::optional<double> wet_spell_threshold(const RainSeries& rain, const YearRange& years);

template <typename Scalar>
WetSpellThresholdMap compute_wet_spell_threshold(const FieldSeries<Scalar>& obs,
                                                 const YearRange& years) {
  if (years.empty()) throw Error(ErrorKind::InvalidArgument, "empty climatology year range");
  if (!obs.covers(CalendarDate(years.first, 6, 1), CalendarDate(years.last, 10, 4))) {
    throw Error(ErrorKind::InsufficientData, "observations do not cover the climatology years");
  }
  WetSpellThresholdMap out{obs.grid(), Eigen::VectorXd::Constant(
                                           obs.n_cells(), std::numeric_limits<double>::quiet_NaN())};
  for (Eigen::Index c = 0; c < obs.n_cells(); ++c) {
    const auto series = obs.cell_series(c);
    if (auto t = wet_spell_threshold(RainSeries{obs.start_date(), series}, years)) out.mm[c] = *t;
  }
  return out;
}

/// Earliest d in [search_start, search_end] with rain(d) >= 1 mm and
/// rain(d..d+4) >= threshold; d+4 must lie inside the series.
std::optional<CalendarDate> detect_first_wet_spell(
    const RainSeries& rain, double threshold, const CalendarDate& search_start,
    std::optional<CalendarDate> search_end = std::nullopt);

/// A 10-day window totalling < 5 mm starting within `follow_up_days` after
/// the candidate invalidates it.
struct DrySpellRule {
  int follow_up_days = 30;
  int spell_days = 10;
  double max_total_mm = 5.0;
};

enum class DetectionStatus { Found, Absent, Undecidable };

struct OnsetDetection {
  DetectionStatus status = DetectionStatus::Absent;
  std::optional<CalendarDate> date;
};

/// Wet spell from `search_start` not followed by a dry spell; a rejected
/// candidate resumes the scan on the next day.
OnsetDetection detect_onset_moron_robertson(const RainSeries& rain, double threshold,
                                            const CalendarDate& search_start,
                                            std::optional<CalendarDate> search_end = std::nullopt,
                                            const DrySpellRule& rule = {});

/// First wet spell strictly after `mok_median` of `year`, up to September 30.
std::optional<CalendarDate> detect_onset_mok_filtered(const RainSeries& rain, double threshold,
                                                      int year, MonthDay mok_median = kMokMedian);

/// MOK-filtered onsets for every cell and year of `years`.
template <typename Scalar>
OnsetTable detect_onsets(const FieldSeries<Scalar>& obs, const WetSpellThresholdMap& thresholds,
                         const std::vector<int>& years, MonthDay mok_median = kMokMedian) {
  if (!(thresholds.grid == obs.grid())) {
    throw Error(ErrorKind::ShapeMismatch, "threshold map grid differs from observation grid");
  }
  OnsetTable table(years, obs.n_cells(), OnsetVariant::MokFiltered);
  for (Eigen::Index c = 0; c < obs.n_cells(); ++c) {
    if (std::isnan(thresholds.mm[c])) continue;
    const auto series = obs.cell_series(c);
    const RainSeries rain{obs.start_date(), series};
    for (int y : years) {
      table.set(c, y, detect_onset_mok_filtered(rain, thresholds.mm[c], y, mok_median));
    }
  }
  return table;
}

/// Daily Webster-Yang index (m/s) with its June-2 climatological reference.
struct WyiSeries {
  CalendarDate start;
  Eigen::VectorXd values;
  std::optional<double> reference;

  CalendarDate date_at(Eigen::Index i) const { return date_add(start, static_cast<long>(i)); }
};

/// Area-weighted mean of u200 minus that of u850 over the cells of `box`.
template <typename Scalar>
WyiSeries compute_wyi(const FieldSeries<Scalar>& u200, const FieldSeries<Scalar>& u850,
                      const LatLonBox& box = kWebsterYangBox) {
  if (u200.start_date() != u850.start_date() || u200.n_days() != u850.n_days()) {
    throw Error(ErrorKind::ShapeMismatch, "u200 and u850 dates are not aligned");
  }
  if (u200.units() != Units::MetresPerSecond || u850.units() != Units::MetresPerSecond) {
    throw Error(ErrorKind::UnitMismatch, "zonal wind fields must be in m/s");
  }
  const RegionSpec r200 = RegionSpec::from_box("wyi_box", u200.grid(), box);
  const RegionSpec r850 = RegionSpec::from_box("wyi_box", u850.grid(), box);
  WyiSeries out{u200.start_date(), Eigen::VectorXd(u200.n_days()), std::nullopt};
  for (Eigen::Index t = 0; t < u200.n_days(); ++t) {
    out.values[t] = area_weighted_mean(u200, r200, t) - area_weighted_mean(u850, r850, t);
  }
  return out;
}

/// Mean of the raw June-2 values over `years`.
double wyi_reference(const WyiSeries& wyi, const std::vector<int>& years,
                     MonthDay anchor = kMokMedian);

/// First date from April 1 (or from the seventh series day, whichever is
/// later) to September 30 whose trailing 7-day mean is >= the reference.
std::optional<CalendarDate> wyi_onset(const WyiSeries& wyi, int year);

}  // namespace onsetbench
