#pragma once

#include <cstdint>
#include <filesystem>
#include <random>

#include "onsetbench/deterministic.hpp"

namespace onsetbench {

/// Synthetic monsoon seasons with planted spell structure. Days before the
/// onset stay below 1 mm (except an optional early false start), and every
/// day from the onset on carries at least threshold/5 mm, so the MOK-filtered
/// onset is exactly the planted date.
struct SeasonSpec {
  MonthDay onset_mean{6, 20};
  double onset_spread_days = 5.0;
  /// Delay per degree of north-westward displacement from (18N, 90E).
  double northwest_delay_per_degree = 0.0;
  /// Year-wide offset shared by all cells (sd, days).
  double shared_year_sd = 0.0;
  /// Probability that a cell-year has no onset at all.
  double absent_rate = 0.0;
  /// Probability of a 5-day false start between the two dates below.
  double false_start_rate = 0.0;
  MonthDay false_start_earliest{5, 1};
  MonthDay false_start_latest{5, 25};
  double wet_excess_mean_mm = 6.0;
  double wet_excess_sd_mm = 4.0;
  double dry_max_mm = 0.8;
  /// Probability of a 12-day dry break starting 8-18 days after onset.
  double post_onset_dry_spell_prob = 0.0;
  double threshold_mm = 40.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticArchive {
  DailyFieldSeries rain;
  OnsetTable truth;
  WetSpellThresholdMap thresholds;
};

/// One season (January 1 to December 31 of `year`) per cell.
SyntheticArchive generate_season(const SeasonSpec& spec, const RegularGrid& grid, int year);

/// Contiguous daily archive over `years`.
SyntheticArchive generate_archive(const SeasonSpec& spec, const RegularGrid& grid,
                                  const YearRange& years);

struct EnsembleSpec {
  int members = 1;
  double bias_days = 0.0;
  double noise_sd_days = 0.0;
  double miss_prob = 0.0;
  int horizon_days = 46;
  std::uint64_t seed = 7;

  void validate() const;
};

/// Member forecasts for every initialization of `year`: each member's onset
/// is the true onset shifted by bias plus rounded Gaussian noise, or absent
/// with probability `miss_prob` (or when the truth has no onset).
ForecastSet generate_ensemble(const EnsembleSpec& ens, const SeasonSpec& season,
                              const OnsetTable& truth, const RegularGrid& grid,
                              std::span<const CalendarDate> inits, const std::string& model = "synthetic");

/// Observations sliced into single-member forecasts (lead 1 onward).
template <typename Scalar>
ForecastSet replay_observations(const FieldSeries<Scalar>& obs,
                                std::span<const CalendarDate> inits, int horizon_days = 46,
                                const std::string& model = "observed") {
  ForecastSet set{model, 1, {}};
  for (const auto& init : inits) {
    const Eigen::Index i0 = obs.day_index(date_add(init, 1));
    if (i0 < 0) continue;
    const Eigen::Index n = std::min<Eigen::Index>(horizon_days, obs.n_days() - i0);
    FieldSeries<float>::Matrix block = obs.values().middleRows(i0, n).template cast<float>();
    set.runs[init].emplace_back(obs.grid(), date_add(init, 1), obs.units(), std::move(block));
  }
  return set;
}

struct SyntheticArchiveOptions {
  SeasonSpec season;
  /// Imperfect model; the perfect model replays the observations.
  EnsembleSpec noisy{4, 1.0, 2.0, 0.05, 46, 11};
  YearRange years{1995, 2024};
  YearRange forecast_years{2019, 2024};
  int perfect_members = 2;
};

/// Writes observations (rain.gsf) on `grid`, forecasts for the models
/// "perfect" and "noisy", and a matching config.json; returns the config path.
std::filesystem::path write_synthetic_archive(const std::filesystem::path& dir, const RegularGrid& grid,
                                              const SyntheticArchiveOptions& options = {});

/// Deterministic 64-bit mix of a seed with up to four integer keys.
std::uint64_t derive_seed(std::uint64_t seed, std::int64_t a, std::int64_t b = 0,
                          std::int64_t c = 0, std::int64_t d = 0);

}  // namespace onsetbench
