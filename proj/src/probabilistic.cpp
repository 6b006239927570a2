#include "onsetbench/probabilistic.hpp"

namespace onsetbench {

BinScheme::BinScheme(int span_days, int width) : span_(span_days), width_(width) {
  if (width_ <= 0 || span_ <= 0 || span_ % width_ != 0) {
    throw Error(ErrorKind::InvalidArgument, "bin width must divide a positive window span");
  }
}

int BinScheme::bin_of_lead(std::optional<long> lead) const {
  if (!lead) return beyond_bin();
  if (*lead <= 0) return pre_init_bin();
  if (*lead > span_) return beyond_bin();
  return 1 + static_cast<int>((*lead - 1) / width_);
}

ProbForecast bin_member_onsets(std::span<const std::optional<CalendarDate>> members,
                               const CalendarDate& init, const BinScheme& scheme,
                               std::optional<CalendarDate> observed) {
  if (members.empty()) throw Error(ErrorKind::EnsembleSize, "forecast has no members");
  ProbForecast f;
  f.counts = Eigen::ArrayXi::Zero(scheme.n_bins());
  f.members = static_cast<int>(members.size());
  for (const auto& m : members) {
    std::optional<long> lead;
    if (m) {
      lead = date_diff(*m, init);
      if (*lead < 1) {
        throw Error(ErrorKind::InvalidArgument,
                    "member onset " + m->iso() + " precedes initialization " + init.iso());
      }
    }
    ++f.counts[scheme.bin_of_lead(lead)];
  }
  std::optional<long> obs_lead;
  if (observed) obs_lead = date_diff(*observed, init);
  f.truth_bin = scheme.bin_of_lead(obs_lead);
  return f;
}

ForecastPool pool_forecasts(std::span<const ProbForecast> forecasts, bool with_pre_init) {
  if (forecasts.empty()) throw Error(ErrorKind::InvalidArgument, "no forecasts to pool");
  const Eigen::Index bins = forecasts.front().counts.size();
  const Eigen::Index skip = with_pre_init ? 0 : 1;
  const Eigen::Index m = bins - skip;
  const auto n = static_cast<Eigen::Index>(forecasts.size());
  ForecastPool pool{Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& f = forecasts[static_cast<std::size_t>(i)];
    if (f.counts.size() != bins) {
      throw Error(ErrorKind::ShapeMismatch, "pooled forecasts use different bin sets");
    }
    if (f.counts.sum() != f.members) {
      throw Error(ErrorKind::InvalidArgument, "bin counts do not sum to the ensemble size");
    }
    pool.p.row(i) = f.probabilities().tail(m).matrix().transpose();
    pool.y.row(i) = f.truth().tail(m).matrix().transpose();
    pool.w[i] = f.members;
  }
  return pool;
}

double skill(double x_model, double x_clim) {
  if (!(x_clim > 0.0)) {
    throw Error(ErrorKind::Undefined, "skill undefined for non-positive reference score");
  }
  return 1.0 - x_model / x_clim;
}

Eigen::VectorXd uniform_probability_edges(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "need at least one probability bin");
  Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(n + 1, 0.0, 1.0);
  e[n] = 1.0;
  return e;
}

ProbScores score_forecasts(std::span<const ProbForecast> forecasts,
                           std::span<const ProbForecast> climatology, TieRule ties,
                           int reliability_bins) {
  ProbScores s;
  s.n_forecasts = forecasts.size();
  const ForecastPool no_pre = pool_forecasts(forecasts, false);
  const ForecastPool all = pool_forecasts(forecasts, true);
  s.brier = fair_brier_score(no_pre.p, no_pre.y, no_pre.w);
  s.rps = fair_rps_score(all.p, all.y, all.w);
  try {
    s.auc = roc_auc(no_pre.p, no_pre.y, ties);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Undefined) throw;
  }
  s.reliability = reliability_curve(no_pre.p, no_pre.y, uniform_probability_edges(reliability_bins));
  if (!climatology.empty()) {
    const ForecastPool c_no_pre = pool_forecasts(climatology, false);
    const ForecastPool c_all = pool_forecasts(climatology, true);
    const double cb = fair_brier_score(c_no_pre.p, c_no_pre.y, c_no_pre.w);
    const double cr = fair_rps_score(c_all.p, c_all.y, c_all.w);
    if (cb > 0.0) s.bss = skill(s.brier, cb);
    if (cr > 0.0) s.rpss = skill(s.rps, cr);
  }
  return s;
}

}  // namespace onsetbench
