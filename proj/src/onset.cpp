#include "onsetbench/onset.hpp"

#include <algorithm>

namespace onsetbench {

std::vector<int> YearRange::years() const {
  std::vector<int> out;
  for (int y = first; y <= last; ++y) out.push_back(y);
  return out;
}

std::string_view to_string(OnsetVariant v) {
  switch (v) {
    case OnsetVariant::MoronRobertson: return "moron_robertson";
    case OnsetVariant::MokFiltered: return "mok_filtered";
    case OnsetVariant::Wyi: return "wyi";
  }
  return "?";
}

OnsetTable::OnsetTable(std::vector<int> years, Eigen::Index n_cells, OnsetVariant variant)
    : years_(std::move(years)), n_cells_(n_cells), variant_(variant) {
  std::sort(years_.begin(), years_.end());
  if (std::adjacent_find(years_.begin(), years_.end()) != years_.end()) {
    throw Error(ErrorKind::InvalidArgument, "onset table years must be unique");
  }
  data_.resize(years_.size() * static_cast<std::size_t>(n_cells_));
}

bool OnsetTable::has_year(int year) const {
  return std::binary_search(years_.begin(), years_.end(), year);
}

std::size_t OnsetTable::slot(Eigen::Index cell, int year) const {
  const auto it = std::lower_bound(years_.begin(), years_.end(), year);
  if (it == years_.end() || *it != year) {
    throw Error(ErrorKind::OutOfRange, "year " + std::to_string(year) + " not in onset table");
  }
  if (cell < 0 || cell >= n_cells_) {
    throw Error(ErrorKind::OutOfRange, "cell " + std::to_string(cell) + " not in onset table");
  }
  return static_cast<std::size_t>(cell) * years_.size() +
         static_cast<std::size_t>(it - years_.begin());
}

const std::optional<CalendarDate>& OnsetTable::at(Eigen::Index cell, int year) const {
  return data_[slot(cell, year)];
}

void OnsetTable::set(Eigen::Index cell, int year, std::optional<CalendarDate> onset) {
  if (onset && onset->year() != year) {
    throw Error(ErrorKind::InvalidArgument, "onset " + onset->iso() + " outside year " +
                                                std::to_string(year));
  }
  data_[slot(cell, year)] = onset;
}

std::vector<OnsetRecord> OnsetTable::records() const {
  std::vector<OnsetRecord> out;
  out.reserve(data_.size());
  for (Eigen::Index c = 0; c < n_cells_; ++c) {
    for (int y : years_) out.push_back({c, y, at(c, y), variant_});
  }
  return out;
}

namespace {

// Sum of rain[i..i+n), or nullopt if any value is missing or out of range.
std::optional<double> window_sum(const RainSeries& rain, long i, int n) {
  if (i < 0 || i + n > rain.size()) return std::nullopt;
  double s = 0.0;
  for (long k = i; k < i + n; ++k) {
    const double v = rain.values[static_cast<std::size_t>(k)];
    if (std::isnan(v)) return std::nullopt;
    s += v;
  }
  return s;
}

bool wet_spell_at(const RainSeries& rain, long i, double threshold) {
  const double first = rain.values[static_cast<std::size_t>(i)];
  if (std::isnan(first) || first < kWetDayMm) return false;
  const auto s = window_sum(rain, i, kSpellDays);
  return s && *s >= threshold;
}

}  // namespace

std::optional<double> wet_spell_threshold(const RainSeries& rain, const YearRange& years) {
  if (years.empty()) throw Error(ErrorKind::InvalidArgument, "empty climatology year range");
  double total = 0.0;
  int n_years = 0;
  for (int y = years.first; y <= years.last; ++y) {
    const long i0 = rain.index_of(CalendarDate(y, 6, 1));
    const long i1 = rain.index_of(CalendarDate(y, 9, 30));
    double year_sum = 0.0;
    long count = 0;
    for (long i = std::max(i0, 0L); i <= i1 && i < rain.size(); ++i) {
      const double first = rain.values[static_cast<std::size_t>(i)];
      if (std::isnan(first) || first < kWetDayMm) continue;
      if (const auto s = window_sum(rain, i, kSpellDays)) {
        year_sum += *s;
        ++count;
      }
    }
    if (count > 0) {
      total += year_sum / static_cast<double>(count);
      ++n_years;
    }
  }
  if (n_years == 0) return std::nullopt;
  return total / n_years;
}

std::optional<CalendarDate> detect_first_wet_spell(const RainSeries& rain, double threshold,
                                                   const CalendarDate& search_start,
                                                   std::optional<CalendarDate> search_end) {
  const long i0 = rain.index_of(search_start);
  const long last_complete = rain.size() - kSpellDays;
  if (i0 < 0 || i0 > last_complete) {
    throw Error(ErrorKind::InsufficientData,
                "rain series " + rain.start.iso() + ".." + rain.end().iso() +
                    " too short to test a wet spell from " + search_start.iso());
  }
  long i1 = last_complete;
  if (search_end) i1 = std::min(i1, rain.index_of(*search_end));
  for (long i = i0; i <= i1; ++i) {
    if (wet_spell_at(rain, i, threshold)) return date_add(rain.start, i);
  }
  return std::nullopt;
}

OnsetDetection detect_onset_moron_robertson(const RainSeries& rain, double threshold,
                                            const CalendarDate& search_start,
                                            std::optional<CalendarDate> search_end,
                                            const DrySpellRule& rule) {
  CalendarDate from = search_start;
  while (true) {
    if (search_end && from > *search_end) return {DetectionStatus::Absent, std::nullopt};
    if (rain.index_of(from) > rain.size() - kSpellDays) return {DetectionStatus::Absent, std::nullopt};
    const auto cand = detect_first_wet_spell(rain, threshold, from, search_end);
    if (!cand) return {DetectionStatus::Absent, std::nullopt};
    const long i = rain.index_of(*cand);
    bool rejected = false;
    for (long s = i + 1; s <= i + rule.follow_up_days; ++s) {
      if (s + rule.spell_days > rain.size()) {
        return {DetectionStatus::Undecidable, cand};
      }
      const auto total = window_sum(rain, s, rule.spell_days);
      if (total && *total < rule.max_total_mm) {
        rejected = true;
        break;
      }
    }
    if (!rejected) return {DetectionStatus::Found, cand};
    from = date_add(*cand, 1);
  }
}

std::optional<CalendarDate> detect_onset_mok_filtered(const RainSeries& rain, double threshold,
                                                      int year, MonthDay mok_median) {
  const CalendarDate first = date_add(mok_median.in(year), 1);
  return detect_first_wet_spell(rain, threshold, first, kSeasonEnd.in(year));
}

double wyi_reference(const WyiSeries& wyi, const std::vector<int>& years, MonthDay anchor) {
  if (years.empty()) throw Error(ErrorKind::InvalidArgument, "empty WYI reference years");
  double s = 0.0;
  for (int y : years) {
    const long i = date_diff(anchor.in(y), wyi.start);
    if (i < 0 || i >= wyi.values.size()) {
      throw Error(ErrorKind::MissingData, "WYI series lacks " + anchor.in(y).iso());
    }
    s += wyi.values[i];
  }
  return s / static_cast<double>(years.size());
}

std::optional<CalendarDate> wyi_onset(const WyiSeries& wyi, int year) {
  if (!wyi.reference) throw Error(ErrorKind::Undefined, "WYI climatological reference missing");
  const long n = wyi.values.size();
  const long first = std::max(date_diff(kSeasonSearchStart.in(year), wyi.start), 6L);
  const long last = std::min(date_diff(kSeasonEnd.in(year), wyi.start), n - 1);
  if (first > last) {
    throw Error(ErrorKind::InsufficientData,
                "WYI series does not cover the " + std::to_string(year) + " season");
  }
  for (long i = first; i <= last; ++i) {
    const double mean = wyi.values.segment(i - 6, 7).mean();
    if (mean >= *wyi.reference) return wyi.date_at(i);
  }
  return std::nullopt;
}

}  // namespace onsetbench
