#pragma once

// Reference implementations written straight from the metric definitions,
// with plain loops and no shared code with the optimized scoring paths.

#include <optional>
#include <string>
#include <vector>

#include "onsetbench/deterministic.hpp"
#include "onsetbench/probabilistic.hpp"

namespace onsetbench::oracle {

using Table = std::vector<std::vector<double>>;

double fair_brier(const Table& p, const Table& y, const std::vector<double>& w);
double fair_rps(const Table& p, const Table& y, const std::vector<double>& w);
/// O(N^2) enumeration of every (event, non-event) pair; N <= 1e5.
double auc(const std::vector<double>& p, const std::vector<double>& y, bool half_ties = true);

/// p, y tables from forecasts (pre-init column dropped unless requested).
void tables(const std::vector<ProbForecast>& f, bool with_pre_init, Table& p, Table& y,
            std::vector<double>& w);

double fair_brier(const std::vector<ProbForecast>& f);
double fair_rps(const std::vector<ProbForecast>& f);
double auc(const std::vector<ProbForecast>& f, bool half_ties = true);

struct LedgerMetrics {
  std::optional<double> mae;
  std::optional<double> far;
  std::optional<double> mr;
  std::optional<double> total_miss;
};

/// Literal counting over ledger rows.
LedgerMetrics ledger_metrics(const Ledger& ledger);

/// Exhaustive scan: first index i >= from with x[i] >= 1 and the 5 values
/// from i summing to at least `threshold`; -1 if none.
long first_wet_spell(const std::vector<double>& x, long from, double threshold, long until = -1);

/// Exhaustive June-September wet-start window average, per year then overall.
std::optional<double> wet_spell_threshold(const std::vector<double>& x, const CalendarDate& start,
                                          int first_year, int last_year);

/// Area of a lat/lon cell by midpoint quadrature of R^2 cos(lat) dlat dlon.
double quadrature_cell_area(double lat1, double lat2, double lon1, double lon2, int steps = 20000);

struct CrossCheck {
  std::string name;
  int trials = 0;
  double max_abs_diff = 0.0;
  bool passed = false;
};

/// Random instances scored by the optimized paths and by the oracles.
std::vector<CrossCheck> run_cross_checks(int trials, std::uint64_t seed, double tolerance = 1e-12);

}  // namespace onsetbench::oracle
