#include "onsetbench/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace onsetbench {

ForecastWindow ForecastWindow::by_name(std::string_view name) {
  if (name == "medium") return medium();
  if (name == "subseasonal") return subseasonal();
  throw Error(ErrorKind::InvalidArgument, "unknown forecast window '" + std::string(name) + "'");
}

void InitializationSchedule::set_dates(int year, std::vector<CalendarDate> dates) {
  std::sort(dates.begin(), dates.end());
  if (std::adjacent_find(dates.begin(), dates.end()) != dates.end()) {
    throw Error(ErrorKind::InvalidArgument, "duplicate initialization dates");
  }
  for (const auto& d : dates) {
    if (d.year() != year) {
      throw Error(ErrorKind::InvalidArgument, "initialization " + d.iso() + " outside year " +
                                                  std::to_string(year));
    }
  }
  explicit_[year] = std::move(dates);
}

std::vector<CalendarDate> InitializationSchedule::dates(int year) const {
  if (auto it = explicit_.find(year); it != explicit_.end()) return it->second;
  std::vector<CalendarDate> out;
  const CalendarDate last = rule_.end.in(year);
  for (CalendarDate d = rule_.start.in(year); d <= last; d = date_add(d, 1)) {
    if (std::find(rule_.weekdays.begin(), rule_.weekdays.end(), d.weekday()) !=
        rule_.weekdays.end()) {
      out.push_back(d);
    }
  }
  return out;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::TruePositive: return "TP";
    case Outcome::FalsePositive: return "FP";
    case Outcome::TrueNegative: return "TN";
    case Outcome::FalseNegative: return "FN";
  }
  return "?";
}

Outcome parse_outcome(std::string_view s) {
  if (s == "TP") return Outcome::TruePositive;
  if (s == "FP") return Outcome::FalsePositive;
  if (s == "TN") return Outcome::TrueNegative;
  if (s == "FN") return Outcome::FalseNegative;
  throw Error(ErrorKind::ParseError, "unknown outcome '" + std::string(s) + "'");
}

std::optional<CalendarDate> extract_forecast_onset(const RainSeries& rain,
                                                   const CalendarDate& init,
                                                   const ForecastWindow& window, double threshold,
                                                   MonthDay mok_median) {
  const long first = rain.index_of(date_add(init, 1));
  const long last = rain.index_of(date_add(init, window.required_days()));
  if (first < 0 || last >= rain.size()) {
    throw Error(ErrorKind::InsufficientData,
                "forecast from " + init.iso() + " shorter than the " +
                    std::to_string(window.required_days()) + " days the " + window.name +
                    " window needs");
  }
  const CalendarDate lo = std::max(date_add(init, window.first_lead),
                                   date_add(mok_median.in(init.year()), 1));
  const CalendarDate hi = std::min(date_add(init, window.last_lead), kSeasonEnd.in(init.year()));
  if (lo > hi) return std::nullopt;
  return detect_first_wet_spell(rain, threshold, lo, hi);
}

Classification classify(std::optional<CalendarDate> predicted,
                        std::optional<CalendarDate> observed, const CalendarDate& init,
                        const ForecastWindow& window) {
  if (predicted) {
    if (!observed) return {Outcome::FalsePositive, std::nullopt};
    const long err = std::labs(date_diff(*predicted, *observed));
    return {err <= window.tolerance ? Outcome::TruePositive : Outcome::FalsePositive, err};
  }
  if (observed) {
    const long lead = date_diff(*observed, init);
    if (lead >= 1 && lead <= window.last_lead) return {Outcome::FalseNegative, std::nullopt};
  }
  return {Outcome::TrueNegative, std::nullopt};
}

std::optional<CalendarDate> ensemble_reduce(
    std::span<const std::optional<CalendarDate>> members) {
  std::vector<CalendarDate> present;
  for (const auto& m : members)
    if (m) present.push_back(*m);
  if (members.empty() || 2 * present.size() < members.size()) return std::nullopt;
  const CalendarDate ref = present.front();
  double sum = 0.0;
  for (const auto& d : present) sum += static_cast<double>(date_diff(d, ref));
  const double mean = sum / static_cast<double>(present.size());
  return date_add(ref, static_cast<long>(std::floor(mean + 0.5)));
}

YearEvaluation evaluate_year(const OnsetForecaster& forecaster, Eigen::Index cell, int year,
                             std::span<const CalendarDate> inits, const ForecastWindow& window,
                             std::optional<CalendarDate> observed,
                             const EvaluationOptions& options) {
  YearEvaluation ev;
  double err_sum = 0.0;
  long err_n = 0;
  for (const auto& init : inits) {
    const bool after = observed && date_add(init, window.first_lead) > *observed;
    if (after && !options.count_post_onset_inits) break;
    std::optional<CalendarDate> predicted;
    try {
      predicted = forecaster(init);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientData && e.kind() != ErrorKind::MissingData) throw;
      ev.skipped.push_back({cell, init, e.what()});
      continue;
    }
    const Classification cls = classify(predicted, observed, init, window);
    LedgerRow row{cell, year, init, window.name, cls.outcome, cls.abs_error, predicted, observed,
                  false, after};
    if (observed) {
      const long lead = date_diff(*observed, init);
      row.onset_in_window = lead >= window.first_lead && lead <= window.last_lead;
    }
    if (!after) {
      if (observed) ev.total_miss_eligible = true;
      if (predicted) ev.any_onset_forecast = true;
      if (cls.abs_error) {
        err_sum += static_cast<double>(*cls.abs_error);
        ++err_n;
      }
    }
    ev.rows.push_back(std::move(row));
  }
  if (err_n > 0) ev.mae = err_sum / static_cast<double>(err_n);
  return ev;
}

YearEvaluation evaluate_year(const ForecastSet& model, Eigen::Index cell, int year,
                             std::span<const CalendarDate> inits, const ForecastWindow& window,
                             std::optional<CalendarDate> observed, double threshold,
                             const EvaluationOptions& options) {
  const OnsetForecaster f = [&](const CalendarDate& init) {
    const auto it = model.runs.find(init);
    if (it == model.runs.end() || it->second.empty()) {
      throw Error(ErrorKind::MissingData, model.model + " has no run initialized " + init.iso());
    }
    std::vector<std::optional<CalendarDate>> members;
    members.reserve(it->second.size());
    for (const auto& run : it->second) {
      const auto series = run.cell_series(cell);
      members.push_back(extract_forecast_onset(RainSeries{run.start_date(), series}, init, window,
                                               threshold, options.mok_median));
    }
    return ensemble_reduce(members);
  };
  return evaluate_year(f, cell, year, inits, window, observed, options);
}

OnsetForecaster climatology_forecaster(const OnsetClimatology& clim, Eigen::Index cell,
                                       const ForecastWindow& window, MonthDay mok_median) {
  return [&clim, cell, window, mok_median](const CalendarDate& init) -> std::optional<CalendarDate> {
    const auto d = clim.mean_date(cell, init.year());
    if (!d) return std::nullopt;
    const long lead = date_diff(*d, init);
    if (lead < window.first_lead || lead > window.last_lead) return std::nullopt;
    if (*d <= mok_median.in(d->year()) || *d > kSeasonEnd.in(d->year())) return std::nullopt;
    return d;
  };
}

OnsetForecaster observation_forecaster(const RainSeries& obs, const ForecastWindow& window,
                                       double threshold, MonthDay mok_median) {
  return [obs, window, threshold, mok_median](const CalendarDate& init) {
    const long i0 = obs.index_of(date_add(init, 1));
    if (i0 < 0) throw Error(ErrorKind::InsufficientData, "observations start after " + init.iso());
    const long n = std::min<long>(window.required_days(), obs.size() - i0);
    const RainSeries slice{date_add(init, 1),
                           obs.values.subspan(static_cast<std::size_t>(i0),
                                              static_cast<std::size_t>(std::max(n, 0L)))};
    return extract_forecast_onset(slice, init, window, threshold, mok_median);
  };
}

std::map<std::pair<Eigen::Index, int>, double> per_year_mae(std::span<const LedgerRow> ledger) {
  std::map<std::pair<Eigen::Index, int>, std::pair<double, long>> acc;
  for (const auto& r : ledger) {
    if (r.after_onset || !r.abs_error) continue;
    auto& a = acc[{r.cell, r.year}];
    a.first += static_cast<double>(*r.abs_error);
    ++a.second;
  }
  std::map<std::pair<Eigen::Index, int>, double> out;
  for (const auto& [k, v] : acc) out[k] = v.first / static_cast<double>(v.second);
  return out;
}

namespace {

struct Counts {
  long tp = 0, fp = 0, tn = 0, fn = 0, in_window = 0;
  void add(const LedgerRow& r) {
    switch (r.outcome) {
      case Outcome::TruePositive: ++tp; break;
      case Outcome::FalsePositive: ++fp; break;
      case Outcome::TrueNegative: ++tn; break;
      case Outcome::FalseNegative: ++fn; break;
    }
    if (r.onset_in_window && !r.after_onset) ++in_window;
  }
  std::optional<double> far() const {
    if (fp + tn == 0) return std::nullopt;
    return static_cast<double>(fp) / static_cast<double>(fp + tn);
  }
  std::optional<double> mr() const {
    if (in_window == 0) return std::nullopt;
    return static_cast<double>(fn) / static_cast<double>(in_window);
  }
};

struct MissCount {
  bool eligible = false;
  bool forecast = false;
};

}  // namespace

DeterministicScores aggregate_scores(std::span<const LedgerRow> ledger, const RegionSpec* region) {
  std::set<Eigen::Index> allowed;
  if (region) allowed.insert(region->cells().begin(), region->cells().end());
  std::vector<LedgerRow> rows;
  for (const auto& r : ledger)
    if (!region || allowed.count(r.cell)) rows.push_back(r);
  if (rows.empty()) throw Error(ErrorKind::MissingData, "no ledger rows to aggregate");

  DeterministicScores s;
  Counts total;
  std::map<Eigen::Index, Counts> per_cell;
  std::map<std::pair<Eigen::Index, int>, MissCount> misses;
  for (const auto& r : rows) {
    total.add(r);
    per_cell[r.cell].add(r);
    if (!r.after_onset) {
      auto& m = misses[{r.cell, r.year}];
      if (r.observed) m.eligible = true;
      if (r.predicted) m.forecast = true;
    }
  }
  s.tp = total.tp;
  s.fp = total.fp;
  s.tn = total.tn;
  s.fn = total.fn;
  s.onsets_in_window = total.in_window;
  s.far = total.far();
  s.mr = total.mr();

  const auto maes = per_year_mae(rows);
  if (!maes.empty()) {
    double sum = 0.0;
    for (const auto& [k, v] : maes) sum += v;
    const double n = static_cast<double>(maes.size());
    s.mae = sum / n;
    if (maes.size() >= 2) {
      double ss = 0.0;
      for (const auto& [k, v] : maes) ss += (v - *s.mae) * (v - *s.mae);
      s.mae_se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
  }

  std::map<Eigen::Index, std::pair<long, long>> cell_miss;
  for (const auto& [k, m] : misses) {
    if (!m.eligible) continue;
    ++s.cell_years;
    auto& cm = cell_miss[k.first];
    ++cm.first;
    if (!m.forecast) {
      ++s.missed_cell_years;
      ++cm.second;
    }
  }
  if (s.cell_years > 0) {
    s.total_miss = static_cast<double>(s.missed_cell_years) / static_cast<double>(s.cell_years);
  }

  std::map<Eigen::Index, std::pair<double, long>> cell_mae;
  for (const auto& [k, v] : maes) {
    auto& a = cell_mae[k.first];
    a.first += v;
    ++a.second;
  }
  for (const auto& [cell, counts] : per_cell) {
    CellScores cs;
    cs.cell = cell;
    cs.far = counts.far();
    cs.mr = counts.mr();
    if (auto it = cell_mae.find(cell); it != cell_mae.end()) {
      cs.mae = it->second.first / static_cast<double>(it->second.second);
    }
    if (auto it = cell_miss.find(cell); it != cell_miss.end() && it->second.first > 0) {
      cs.total_miss = static_cast<double>(it->second.second) / static_cast<double>(it->second.first);
    }
    s.cells.push_back(cs);
  }
  return s;
}

}  // namespace onsetbench
