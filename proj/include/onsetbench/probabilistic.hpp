#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "onsetbench/calendar.hpp"
#include "onsetbench/error.hpp"

namespace onsetbench {

/// Outcome bins for an onset forecast covering lead days 1..span_days:
/// bin 0 is "before initialization", bins 1..k are consecutive `width`-day
/// lead bins, and the last bin is "after the window" (or no onset).
class BinScheme {
 public:
  BinScheme() : BinScheme(15, 5) {}
  BinScheme(int span_days, int width);

  int span_days() const { return span_; }
  int width() const { return width_; }
  int n_day_bins() const { return span_ / width_; }
  int n_bins() const { return n_day_bins() + 2; }
  int pre_init_bin() const { return 0; }
  int beyond_bin() const { return n_bins() - 1; }

  /// Bin for an onset `lead` days after initialization; nullopt = no onset.
  int bin_of_lead(std::optional<long> lead) const;

  friend bool operator==(const BinScheme&, const BinScheme&) = default;

 private:
  int span_ = 15;
  int width_ = 5;
};

/// Binned ensemble forecast: raw member counts per bin and the observed bin.
struct ProbForecast {
  Eigen::ArrayXi counts;
  int members = 0;
  int truth_bin = 0;

  Eigen::ArrayXd probabilities() const {
    return counts.cast<double>() / static_cast<double>(members);
  }
  Eigen::ArrayXd truth() const {
    Eigen::ArrayXd y = Eigen::ArrayXd::Zero(counts.size());
    y[truth_bin] = 1.0;
    return y;
  }
};

/// Counts member onsets into bins; members without an onset fall in the
/// beyond-window bin and model members never populate the pre-init bin.
ProbForecast bin_member_onsets(std::span<const std::optional<CalendarDate>> members,
                               const CalendarDate& init, const BinScheme& scheme,
                               std::optional<CalendarDate> observed);

/// Probability/outcome/ensemble-size matrices pooled from forecasts.
struct ForecastPool {
  Eigen::MatrixXd p;  // n x m
  Eigen::MatrixXd y;  // n x m
  Eigen::VectorXd w;  // n
};

/// Stacks forecasts row-wise; drops the pre-init bin unless `with_pre_init`.
ForecastPool pool_forecasts(std::span<const ProbForecast> forecasts, bool with_pre_init);

namespace detail {
template <typename DerivedW>
void check_fair_sizes(const Eigen::DenseBase<DerivedW>& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w.derived().coeff(i) >= 2)) {
      throw Error(ErrorKind::EnsembleSize,
                  "fair scores need at least 2 ensemble members (forecast " +
                      std::to_string(i) + " has " +
                      std::to_string(static_cast<long>(w.derived().coeff(i))) + ")");
    }
  }
}
}  // namespace detail

/// Ensemble-size-adjusted Brier score:
/// (1/nm) sum_ij [(Y - p)^2 - p(1 - p)/(w - 1)].
template <typename DerivedP, typename DerivedY, typename DerivedW>
double fair_brier_score(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedY>& y,
                        const Eigen::MatrixBase<DerivedW>& w) {
  if (p.rows() != y.rows() || p.cols() != y.cols() || w.size() != p.rows() || p.size() == 0) {
    throw Error(ErrorKind::ShapeMismatch, "fair Brier inputs disagree in shape");
  }
  detail::check_fair_sizes(w);
  const auto pa = p.array();
  const Eigen::ArrayXd inv = 1.0 / (w.derived().array().template cast<double>() - 1.0);
  const Eigen::ArrayXXd spread = (pa * (1.0 - pa)).colwise() * inv;
  const double total = ((y.array() - pa).square() - spread).sum();
  return total / static_cast<double>(p.rows() * p.cols());
}

/// Ensemble-size-adjusted ranked probability score over ordered bins, using
/// cumulative sums C_k = sum_{j<=k} p_j along each row.
template <typename DerivedP, typename DerivedY, typename DerivedW>
double fair_rps_score(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedY>& y,
                      const Eigen::MatrixBase<DerivedW>& w) {
  if (p.rows() != y.rows() || p.cols() != y.cols() || w.size() != p.rows() || p.size() == 0) {
    throw Error(ErrorKind::ShapeMismatch, "fair RPS inputs disagree in shape");
  }
  detail::check_fair_sizes(w);
  Eigen::ArrayXXd cp = p.array();
  Eigen::ArrayXXd cy = y.array();
  for (Eigen::Index k = 1; k < cp.cols(); ++k) {
    cp.col(k) += cp.col(k - 1);
    cy.col(k) += cy.col(k - 1);
  }
  const Eigen::ArrayXd inv = 1.0 / (w.derived().array().template cast<double>() - 1.0);
  const Eigen::ArrayXXd spread = (cp * (1.0 - cp)).colwise() * inv;
  const double total = ((cy - cp).square() - spread).sum();
  return total / static_cast<double>(p.rows() * p.cols());
}

enum class TieRule { Half, Strict };

/// Area under the ROC curve in Mann-Whitney form over all (event,
/// non-event) pairs of the flattened arrays. Ties score 0.5 under
/// TieRule::Half and 0 under TieRule::Strict.
template <typename DerivedP, typename DerivedY>
double roc_auc(const Eigen::DenseBase<DerivedP>& p, const Eigen::DenseBase<DerivedY>& y,
               TieRule ties = TieRule::Half) {
  if (p.size() != y.size()) throw Error(ErrorKind::ShapeMismatch, "AUC inputs disagree in size");
  const Eigen::Index n = p.size();
  std::vector<std::pair<double, bool>> pts(static_cast<std::size_t>(n));
  Eigen::Index i = 0;
  for (Eigen::Index c = 0; c < p.cols(); ++c)
    for (Eigen::Index r = 0; r < p.rows(); ++r, ++i)
      pts[static_cast<std::size_t>(i)] = {static_cast<double>(p.derived().coeff(r, c)),
                                          y.derived().coeff(r, c) > 0.5};
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double events = 0, non_events = 0;
  for (const auto& pt : pts) (pt.second ? events : non_events) += 1.0;
  if (events == 0 || non_events == 0) {
    throw Error(ErrorKind::Undefined, "AUC undefined without both events and non-events");
  }
  // Walk groups of equal probability, accumulating non-events seen below.
  double below = 0.0, credit = 0.0;
  for (std::size_t a = 0; a < pts.size();) {
    std::size_t b = a;
    double ev = 0, ne = 0;
    while (b < pts.size() && pts[b].first == pts[a].first) {
      (pts[b].second ? ev : ne) += 1.0;
      ++b;
    }
    credit += ev * below;
    if (ties == TieRule::Half) credit += 0.5 * ev * ne;
    below += ne;
    a = b;
  }
  return credit / (events * non_events);
}

/// 1 - model / climatology; throws Undefined when the reference is not positive.
double skill(double x_model, double x_clim);

struct ReliabilityPoint {
  double lower = 0, upper = 0;
  double mean_probability = 0;
  double observed_frequency = 0;
  long count = 0;
  double standard_error = 0;
};

/// Observed event frequency per forecast-probability bin. Bins are
/// [e_k, e_k+1) except the last, which is closed. Empty bins have count 0.
template <typename DerivedP, typename DerivedY>
std::vector<ReliabilityPoint> reliability_curve(const Eigen::DenseBase<DerivedP>& p,
                                                const Eigen::DenseBase<DerivedY>& y,
                                                const Eigen::VectorXd& edges) {
  if (edges.size() < 2 || edges[0] != 0.0 || edges[edges.size() - 1] != 1.0) {
    throw Error(ErrorKind::InvalidArgument, "reliability edges must partition [0, 1]");
  }
  for (Eigen::Index k = 1; k < edges.size(); ++k) {
    if (!(edges[k] > edges[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "reliability edges must be ascending");
    }
  }
  const Eigen::Index nb = edges.size() - 1;
  std::vector<ReliabilityPoint> out(static_cast<std::size_t>(nb));
  std::vector<double> sum_p(out.size(), 0.0), sum_y(out.size(), 0.0);
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      const double pv = static_cast<double>(p.derived().coeff(r, c));
      const auto it = std::upper_bound(edges.data(), edges.data() + edges.size(), pv);
      auto k = static_cast<Eigen::Index>(it - edges.data()) - 1;
      k = std::clamp<Eigen::Index>(k, 0, nb - 1);
      const auto ks = static_cast<std::size_t>(k);
      ++out[ks].count;
      sum_p[ks] += pv;
      sum_y[ks] += static_cast<double>(y.derived().coeff(r, c));
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& pt = out[k];
    pt.lower = edges[static_cast<Eigen::Index>(k)];
    pt.upper = edges[static_cast<Eigen::Index>(k) + 1];
    if (pt.count == 0) continue;
    const double n = static_cast<double>(pt.count);
    pt.mean_probability = sum_p[k] / n;
    pt.observed_frequency = sum_y[k] / n;
    pt.standard_error = std::sqrt(pt.observed_frequency * (1.0 - pt.observed_frequency) / n);
  }
  return out;
}

/// `n` equal-width probability bins on [0, 1].
Eigen::VectorXd uniform_probability_edges(int n);

struct ProbScores {
  std::size_t n_forecasts = 0;
  double brier = 0;
  double rps = 0;
  std::optional<double> auc;
  std::optional<double> bss;
  std::optional<double> rpss;
  std::vector<ReliabilityPoint> reliability;
};

/// Fair BS (pre-init bin excluded), fair RPS (all bins) and AUC (pre-init
/// bin excluded) over the pooled forecasts; skill scores when a
/// climatological pool is supplied.
ProbScores score_forecasts(std::span<const ProbForecast> forecasts,
                           std::span<const ProbForecast> climatology = {},
                           TieRule ties = TieRule::Half, int reliability_bins = 10);

}  // namespace onsetbench
