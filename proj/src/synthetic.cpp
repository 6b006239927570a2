#include "onsetbench/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace onsetbench {

std::uint64_t derive_seed(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c,
                          std::int64_t d) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed);
  for (std::int64_t k : {a, b, c, d}) h = mix(h ^ static_cast<std::uint64_t>(k));
  return h;
}

void SeasonSpec::validate() const {
  const CalendarDate ref = onset_mean.in(2001);
  if (ref < CalendarDate(2001, 4, 1) || ref > CalendarDate(2001, 9, 30)) {
    throw Error(ErrorKind::InvalidArgument, "planted onset mean outside April-September");
  }
  if (onset_spread_days < 0 || shared_year_sd < 0 || wet_excess_mean_mm <= 0 ||
      wet_excess_sd_mm <= 0 || dry_max_mm < 0 || dry_max_mm >= kWetDayMm) {
    throw Error(ErrorKind::InvalidArgument, "invalid synthetic rain distribution");
  }
  if (threshold_mm < kSpellDays * kWetDayMm) {
    throw Error(ErrorKind::InvalidArgument, "synthetic threshold must be at least 5 mm");
  }
  for (double p : {absent_rate, false_start_rate, post_onset_dry_spell_prob}) {
    if (p < 0 || p > 1) throw Error(ErrorKind::InvalidArgument, "probability outside [0, 1]");
  }
  if (false_start_latest.in(2001) > CalendarDate(2001, 5, 28) ||
      false_start_earliest.in(2001) > false_start_latest.in(2001) ||
      false_start_earliest.in(2001) < CalendarDate(2001, 4, 1)) {
    throw Error(ErrorKind::InvalidArgument, "false starts must end before June 2");
  }
}

void EnsembleSpec::validate() const {
  if (members < 1) throw Error(ErrorKind::InvalidArgument, "ensemble needs at least one member");
  if (noise_sd_days < 0) throw Error(ErrorKind::InvalidArgument, "noise must be non-negative");
  if (miss_prob < 0 || miss_prob > 1) throw Error(ErrorKind::InvalidArgument, "miss_prob outside [0, 1]");
  if (horizon_days < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
}

namespace {

struct RainDraw {
  std::gamma_distribution<double> excess;
  std::uniform_real_distribution<double> dry;
  double floor;

  explicit RainDraw(const SeasonSpec& s)
      : excess(s.wet_excess_mean_mm * s.wet_excess_mean_mm / (s.wet_excess_sd_mm * s.wet_excess_sd_mm),
               s.wet_excess_sd_mm * s.wet_excess_sd_mm / s.wet_excess_mean_mm),
        dry(0.0, s.dry_max_mm),
        floor(s.threshold_mm / kSpellDays) {}

  template <typename Rng>
  double wet(Rng& rng) { return floor + excess(rng); }
  template <typename Rng>
  double dry_day(Rng& rng) { return dry(rng); }
};

long planted_season_day(const SeasonSpec& s, const RegularGrid& grid, Eigen::Index cell,
                        double year_offset, std::mt19937_64& rng) {
  const double lat = grid.lat_center(grid.lat_index(cell));
  const double lon = normalize_longitude(grid.lon_center(grid.lon_index(cell)));
  const double nw = (lat - 18.0) + (90.0 - lon);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double day = static_cast<double>(season_day(s.onset_mean.in(2001))) +
                     s.northwest_delay_per_degree * nw + year_offset +
                     s.onset_spread_days * noise(rng);
  // June 3 .. August 31 keeps the onset inside the MOK-filtered search window
  // with room for follow-up data.
  return std::clamp(std::lround(day), season_day(CalendarDate(2001, 6, 3)),
                    season_day(CalendarDate(2001, 8, 31)));
}

// Fills one cell's values for one calendar year into `out[offset ..]`.
std::optional<CalendarDate> fill_cell_year(const SeasonSpec& s, const RegularGrid& grid,
                                           Eigen::Index cell, int year, double year_offset,
                                           DailyFieldSeries::Matrix& out, Eigen::Index offset) {
  std::mt19937_64 rng(derive_seed(s.seed, year, cell, 1));
  RainDraw draw(s);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CalendarDate jan1(year, 1, 1);
  const long n = date_diff(CalendarDate(year, 12, 31), jan1) + 1;

  const bool absent = u(rng) < s.absent_rate;
  const long onset_sd = planted_season_day(s, grid, cell, year_offset, rng);
  const bool false_start = u(rng) < s.false_start_rate;
  const long fs_lo = date_diff(s.false_start_earliest.in(year), jan1);
  const long fs_hi = date_diff(s.false_start_latest.in(year), jan1);
  const long fs_day = fs_lo + static_cast<long>(std::floor(u(rng) * static_cast<double>(fs_hi - fs_lo + 1)));
  const bool dry_break = u(rng) < s.post_onset_dry_spell_prob;
  const long break_gap = 8 + static_cast<long>(std::floor(u(rng) * 11.0));

  std::optional<CalendarDate> onset;
  long onset_idx = n;  // beyond the year
  if (!absent) {
    onset = from_season_day(year, onset_sd);
    onset_idx = date_diff(*onset, jan1);
  }
  // Rain persists 50 days past September 30 so follow-up windows are complete.
  const long wet_end = date_diff(CalendarDate(year, 11, 19), jan1);
  for (long t = 0; t < n; ++t) {
    double v;
    const bool in_false_start = false_start && t >= fs_day && t < fs_day + kSpellDays;
    const bool in_break = dry_break && t >= onset_idx + break_gap && t < onset_idx + break_gap + 12;
    if (in_false_start) {
      v = draw.wet(rng);
    } else if (t >= onset_idx && t <= wet_end && !in_break) {
      v = draw.wet(rng);
    } else {
      v = draw.dry_day(rng);
    }
    out(offset + t, cell) = v;
  }
  return onset;
}

}  // namespace

SyntheticArchive generate_archive(const SeasonSpec& spec, const RegularGrid& grid,
                                  const YearRange& years) {
  spec.validate();
  if (years.empty()) throw Error(ErrorKind::InvalidArgument, "empty synthetic year range");
  const CalendarDate start(years.first, 1, 1);
  const long n_days = date_diff(CalendarDate(years.last, 12, 31), start) + 1;
  DailyFieldSeries::Matrix values(n_days, grid.n_cells());
  OnsetTable truth(years.years(), grid.n_cells(), OnsetVariant::MokFiltered);
  for (int y = years.first; y <= years.last; ++y) {
    std::mt19937_64 yrng(derive_seed(spec.seed, y, -1, 2));
    std::normal_distribution<double> shared(0.0, 1.0);
    const double year_offset = spec.shared_year_sd * shared(yrng);
    const Eigen::Index offset = date_diff(CalendarDate(y, 1, 1), start);
    for (Eigen::Index c = 0; c < grid.n_cells(); ++c) {
      truth.set(c, y, fill_cell_year(spec, grid, c, y, year_offset, values, offset));
    }
  }
  return {DailyFieldSeries(grid, start, Units::MillimetresPerDay, std::move(values)),
          std::move(truth),
          WetSpellThresholdMap{grid, Eigen::VectorXd::Constant(grid.n_cells(), spec.threshold_mm)}};
}

SyntheticArchive generate_season(const SeasonSpec& spec, const RegularGrid& grid, int year) {
  return generate_archive(spec, grid, YearRange{year, year});
}

ForecastSet generate_ensemble(const EnsembleSpec& ens, const SeasonSpec& season,
                              const OnsetTable& truth, const RegularGrid& grid,
                              std::span<const CalendarDate> inits, const std::string& model) {
  ens.validate();
  season.validate();
  if (truth.n_cells() != grid.n_cells()) {
    throw Error(ErrorKind::ShapeMismatch, "truth table does not match the grid");
  }
  ForecastSet set{model, ens.members, {}};
  RainDraw draw(season);
  for (const auto& init : inits) {
    auto& runs = set.runs[init];
    const CalendarDate first = date_add(init, 1);
    for (int m = 0; m < ens.members; ++m) {
      FieldSeries<float>::Matrix values(ens.horizon_days, grid.n_cells());
      for (Eigen::Index c = 0; c < grid.n_cells(); ++c) {
        std::mt19937_64 rng(derive_seed(ens.seed, date_diff(init, CalendarDate(1900, 1, 1)), m, c));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, 1.0);
        const bool miss = u(rng) < ens.miss_prob;
        const double shift = ens.bias_days + ens.noise_sd_days * noise(rng);
        long planted_lead = ens.horizon_days + 1;
        if (const auto& t = truth.at(c, init.year()); t && !miss) {
          planted_lead = date_diff(*t, first) + std::lround(shift);
        }
        for (long k = 0; k < ens.horizon_days; ++k) {
          values(k, c) = static_cast<float>(k >= planted_lead ? draw.wet(rng) : draw.dry_day(rng));
        }
      }
      runs.emplace_back(grid, first, Units::MillimetresPerDay, std::move(values));
    }
  }
  return set;
}

}  // namespace onsetbench
