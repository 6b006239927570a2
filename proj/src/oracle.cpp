#include "onsetbench/oracle.hpp"

#include <cmath>
#include <map>
#include <random>

#include "onsetbench/synthetic.hpp"

namespace onsetbench::oracle {

double fair_brier(const Table& p, const Table& y, const std::vector<double>& w) {
  double total = 0.0;
  std::size_t n = p.size(), m = p.empty() ? 0 : p[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] < 2) throw Error(ErrorKind::EnsembleSize, "oracle: w < 2");
    for (std::size_t j = 0; j < m; ++j) {
      const double d = y[i][j] - p[i][j];
      total += d * d - p[i][j] * (1.0 - p[i][j]) / (w[i] - 1.0);
    }
  }
  return total / static_cast<double>(n * m);
}

double fair_rps(const Table& p, const Table& y, const std::vector<double>& w) {
  double total = 0.0;
  std::size_t n = p.size(), m = p.empty() ? 0 : p[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] < 2) throw Error(ErrorKind::EnsembleSize, "oracle: w < 2");
    for (std::size_t k = 0; k < m; ++k) {
      double diff = 0.0, cum = 0.0;
      for (std::size_t j = 0; j <= k; ++j) {
        diff += y[i][j] - p[i][j];
        cum += p[i][j];
      }
      total += diff * diff - cum * (1.0 - cum) / (w[i] - 1.0);
    }
  }
  return total / static_cast<double>(n * m);
}

double auc(const std::vector<double>& p, const std::vector<double>& y, bool half_ties) {
  if (p.size() > 100000) throw Error(ErrorKind::InvalidArgument, "oracle AUC instance too large");
  double num = 0.0, events = 0.0, non_events = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (y[a] == 1.0) events += 1.0; else non_events += 1.0;
  }
  if (events == 0.0 || non_events == 0.0) throw Error(ErrorKind::Undefined, "oracle AUC undefined");
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (y[a] != 1.0) continue;
    for (std::size_t b = 0; b < p.size(); ++b) {
      if (y[b] != 0.0) continue;
      if (p[a] > p[b]) num += 1.0;
      else if (half_ties && p[a] == p[b]) num += 0.5;
    }
  }
  return num / (events * non_events);
}

void tables(const std::vector<ProbForecast>& f, bool with_pre_init, Table& p, Table& y,
            std::vector<double>& w) {
  p.clear();
  y.clear();
  w.clear();
  for (const auto& fc : f) {
    std::vector<double> pr, yr;
    for (int j = with_pre_init ? 0 : 1; j < fc.counts.size(); ++j) {
      pr.push_back(static_cast<double>(fc.counts[j]) / static_cast<double>(fc.members));
      yr.push_back(j == fc.truth_bin ? 1.0 : 0.0);
    }
    p.push_back(pr);
    y.push_back(yr);
    w.push_back(fc.members);
  }
}

double fair_brier(const std::vector<ProbForecast>& f) {
  Table p, y;
  std::vector<double> w;
  tables(f, false, p, y, w);
  return fair_brier(p, y, w);
}

double fair_rps(const std::vector<ProbForecast>& f) {
  Table p, y;
  std::vector<double> w;
  tables(f, true, p, y, w);
  return fair_rps(p, y, w);
}

double auc(const std::vector<ProbForecast>& f, bool half_ties) {
  Table p, y;
  std::vector<double> w;
  tables(f, false, p, y, w);
  std::vector<double> fp, fy;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p[i].size(); ++j) {
      fp.push_back(p[i][j]);
      fy.push_back(y[i][j]);
    }
  }
  return auc(fp, fy, half_ties);
}

LedgerMetrics ledger_metrics(const Ledger& ledger) {
  LedgerMetrics out;
  double fp = 0, tn = 0, fn = 0, in_window = 0;
  std::map<std::pair<Eigen::Index, int>, std::vector<double>> errors;
  std::map<std::pair<Eigen::Index, int>, std::pair<bool, bool>> season;  // eligible, forecast
  for (const auto& r : ledger) {
    if (r.outcome == Outcome::FalsePositive) fp += 1;
    if (r.outcome == Outcome::TrueNegative) tn += 1;
    if (r.outcome == Outcome::FalseNegative) fn += 1;
    if (r.after_onset) continue;
    if (r.onset_in_window) in_window += 1;
    if (r.abs_error) errors[{r.cell, r.year}].push_back(static_cast<double>(*r.abs_error));
    auto& s = season[{r.cell, r.year}];
    if (r.observed) s.first = true;
    if (r.predicted) s.second = true;
  }
  if (fp + tn > 0) out.far = fp / (fp + tn);
  if (in_window > 0) out.mr = fn / in_window;
  if (!errors.empty()) {
    double sum = 0.0;
    for (const auto& [k, e] : errors) {
      double s = 0.0;
      for (double v : e) s += v;
      sum += s / static_cast<double>(e.size());
    }
    out.mae = sum / static_cast<double>(errors.size());
  }
  double eligible = 0, missed = 0;
  for (const auto& [k, s] : season) {
    if (!s.first) continue;
    eligible += 1;
    if (!s.second) missed += 1;
  }
  if (eligible > 0) out.total_miss = missed / eligible;
  return out;
}

long first_wet_spell(const std::vector<double>& x, long from, double threshold, long until) {
  const long n = static_cast<long>(x.size());
  for (long i = from; i + 4 < n; ++i) {
    if (until >= 0 && i > until) break;
    if (!(x[i] >= 1.0)) continue;
    double s = 0.0;
    bool ok = true;
    for (long k = 0; k < 5; ++k) {
      if (std::isnan(x[i + k])) ok = false;
      s += x[i + k];
    }
    if (ok && s >= threshold) return i;
  }
  return -1;
}

std::optional<double> wet_spell_threshold(const std::vector<double>& x, const CalendarDate& start,
                                          int first_year, int last_year) {
  double total = 0.0;
  int years = 0;
  for (int y = first_year; y <= last_year; ++y) {
    double s = 0.0;
    int count = 0;
    for (long i = 0; i + 4 < static_cast<long>(x.size()); ++i) {
      const CalendarDate d = date_add(start, i);
      if (d < CalendarDate(y, 6, 1) || d > CalendarDate(y, 9, 30)) continue;
      if (!(x[i] >= 1.0)) continue;
      double acc = 0.0;
      bool ok = true;
      for (long k = 0; k < 5; ++k) {
        if (std::isnan(x[i + k])) ok = false;
        acc += x[i + k];
      }
      if (!ok) continue;
      s += acc;
      ++count;
    }
    if (count > 0) {
      total += s / count;
      ++years;
    }
  }
  if (years == 0) return std::nullopt;
  return total / years;
}

double quadrature_cell_area(double lat1, double lat2, double lon1, double lon2, int steps) {
  const double h = (lat2 - lat1) / steps;
  double s = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double lat = lat1 + (k + 0.5) * h;
    s += std::cos(lat * kDegToRad);
  }
  return kEarthRadiusM * kEarthRadiusM * s * h * kDegToRad * (lon2 - lon1) * kDegToRad;
}

namespace {

std::vector<ProbForecast> random_forecasts(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 40), w_dist(2, 16), lead_dist(-3, 22);
  std::bernoulli_distribution absent(0.2), varied_w(0.5);
  const BinScheme scheme(15, 5);
  const CalendarDate init(2020, 6, 1);
  const int n = n_dist(rng);
  const int fixed_w = w_dist(rng);
  std::vector<ProbForecast> out;
  for (int i = 0; i < n; ++i) {
    const int w = varied_w(rng) ? w_dist(rng) : fixed_w;
    std::vector<std::optional<CalendarDate>> members;
    for (int m = 0; m < w; ++m) {
      const long lead = std::max(1, lead_dist(rng));
      members.push_back(absent(rng) ? std::nullopt : std::optional(date_add(init, lead)));
    }
    std::optional<CalendarDate> obs;
    if (!absent(rng)) obs = date_add(init, lead_dist(rng));
    out.push_back(bin_member_onsets(members, init, scheme, obs));
  }
  return out;
}

void record(CrossCheck& c, double a, double b) {
  c.max_abs_diff = std::max(c.max_abs_diff, std::abs(a - b));
}

void record(CrossCheck& c, const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) {
    c.max_abs_diff = std::numeric_limits<double>::infinity();
    return;
  }
  if (a) record(c, *a, *b);
}

}  // namespace

std::vector<CrossCheck> run_cross_checks(int trials, std::uint64_t seed, double tolerance) {
  CrossCheck bs{"fair_brier"}, rps{"fair_rps"}, roc{"auc"}, mae{"mae"}, far{"far"}, mr{"mr"},
      miss{"total_miss"}, spell{"first_wet_spell"};
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    const auto f = random_forecasts(rng);
    const auto pool = pool_forecasts(f, false);
    const auto pool_all = pool_forecasts(f, true);
    record(bs, fair_brier_score(pool.p, pool.y, pool.w), fair_brier(f));
    record(rps, fair_rps_score(pool_all.p, pool_all.y, pool_all.w), fair_rps(f));
    bool has_both = pool.y.sum() > 0 && pool.y.sum() < static_cast<double>(pool.y.size());
    if (has_both) record(roc, roc_auc(pool.p, pool.y), auc(f));
    ++bs.trials;
    ++rps.trials;
    if (has_both) ++roc.trials;

    // Deterministic metrics on a small synthetic season.
    SeasonSpec season;
    season.seed = derive_seed(seed, t, 1);
    season.onset_spread_days = 8.0;
    season.absent_rate = 0.15;
    const RegularGrid grid = RegularGrid::uniform(18, 26, 4, 70, 78, 4);
    const int year = 2001 + t % 20;
    const auto archive = generate_season(season, grid, year);
    EnsembleSpec ens;
    ens.members = 1 + static_cast<int>(rng() % 5);
    ens.bias_days = static_cast<double>(static_cast<int>(rng() % 9) - 4);
    ens.noise_sd_days = static_cast<double>(rng() % 5);
    ens.miss_prob = 0.2;
    ens.seed = derive_seed(seed, t, 2);
    const auto inits = InitializationSchedule().dates(year);
    const auto model = generate_ensemble(ens, season, archive.truth, grid, inits);
    const auto window = (t % 2 == 0) ? ForecastWindow::medium() : ForecastWindow::subseasonal();
    EvaluationOptions opts;
    opts.count_post_onset_inits = (t % 3 == 0);
    Ledger ledger;
    for (Eigen::Index c = 0; c < grid.n_cells(); ++c) {
      auto ev = evaluate_year(model, c, year, inits, window, archive.truth.at(c, year),
                              season.threshold_mm, opts);
      ledger.insert(ledger.end(), ev.rows.begin(), ev.rows.end());
    }
    const auto fast = aggregate_scores(ledger);
    const auto ref = ledger_metrics(ledger);
    record(mae, fast.mae, ref.mae);
    record(far, fast.far, ref.far);
    record(mr, fast.mr, ref.mr);
    record(miss, fast.total_miss, ref.total_miss);
    ++mae.trials;
    ++far.trials;
    ++mr.trials;
    ++miss.trials;

    // Wet-spell scan on a random sparse series.
    std::vector<double> x(120);
    std::bernoulli_distribution wet(0.35);
    std::exponential_distribution<double> amount(1.0 / 9.0);
    for (auto& v : x) v = wet(rng) ? amount(rng) : 0.0;
    const double thr = 10.0 + static_cast<double>(rng() % 50);
    const CalendarDate start(2010, 4, 1);
    const auto got = detect_first_wet_spell(RainSeries{start, x}, thr, start);
    const long want = first_wet_spell(x, 0, thr);
    const long got_i = got ? date_diff(*got, start) : -1;
    record(spell, static_cast<double>(got_i), static_cast<double>(want));
    ++spell.trials;
  }
  std::vector<CrossCheck> out{bs, rps, roc, mae, far, mr, miss, spell};
  for (auto& c : out) c.passed = c.trials > 0 && c.max_abs_diff <= tolerance;
  return out;
}

}  // namespace onsetbench::oracle
