#pragma once

#include <optional>
#include <vector>

#include "onsetbench/onset.hpp"
#include "onsetbench/probabilistic.hpp"

namespace onsetbench {

/// Historical onset dates per cell and their mean, in March-1-anchored
/// season days so that leap years line up.
class OnsetClimatology {
 public:
  OnsetClimatology() = default;
  /// Mean over detected onsets of `members`; cells without any are NaN.
  explicit OnsetClimatology(OnsetTable members);

  const OnsetTable& members() const { return members_; }
  const std::vector<int>& years() const { return members_.years(); }
  Eigen::Index n_cells() const { return members_.n_cells(); }
  /// Mean season day per cell (NaN where no onset was ever detected).
  const Eigen::VectorXd& mean_season_day() const { return mean_; }
  bool defined(Eigen::Index cell) const { return !std::isnan(mean_[cell]); }

  /// Mean onset rounded half-up to a whole day, placed in `year`.
  std::optional<CalendarDate> mean_date(Eigen::Index cell, int year) const;

 private:
  OnsetTable members_;
  Eigen::VectorXd mean_;
};

template <typename Scalar>
OnsetClimatology build_onset_climatology(const FieldSeries<Scalar>& obs,
                                         const WetSpellThresholdMap& thresholds,
                                         const std::vector<int>& years,
                                         MonthDay mok_median = kMokMedian) {
  return OnsetClimatology(detect_onsets(obs, thresholds, years, mok_median));
}

/// Per cell, mean |rounded climatological date - observed onset| in days
/// over `period` years with an observed onset; NaN where none.
Eigen::VectorXd fixed_climatology_mae(const OnsetClimatology& clim, const OnsetTable& observed,
                                      const std::vector<int>& period);

/// Climatological ensemble forecast: one member per climatology year, its
/// onset transplanted into the initialization's year. Members with onset on
/// or before the initialization fill the pre-init bin, absences the beyond
/// bin. `exclude_year` drops that member (leave-one-out).
ProbForecast climatology_prob_forecast(const OnsetClimatology& clim, Eigen::Index cell,
                                       const CalendarDate& init, const BinScheme& scheme,
                                       std::optional<CalendarDate> observed,
                                       std::optional<int> exclude_year = std::nullopt);

}  // namespace onsetbench
