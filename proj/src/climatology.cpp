#include "onsetbench/climatology.hpp"

namespace onsetbench {

OnsetClimatology::OnsetClimatology(OnsetTable members)
    : members_(std::move(members)),
      mean_(Eigen::VectorXd::Constant(members_.n_cells(),
                                      std::numeric_limits<double>::quiet_NaN())) {
  for (Eigen::Index c = 0; c < members_.n_cells(); ++c) {
    double s = 0.0;
    int n = 0;
    for (int y : members_.years()) {
      if (const auto& d = members_.at(c, y)) {
        s += static_cast<double>(season_day(*d));
        ++n;
      }
    }
    if (n > 0) mean_[c] = s / n;
  }
}

std::optional<CalendarDate> OnsetClimatology::mean_date(Eigen::Index cell, int year) const {
  if (!defined(cell)) return std::nullopt;
  return from_season_day(year, static_cast<long>(std::floor(mean_[cell] + 0.5)));
}

Eigen::VectorXd fixed_climatology_mae(const OnsetClimatology& clim, const OnsetTable& observed,
                                      const std::vector<int>& period) {
  if (clim.n_cells() != observed.n_cells()) {
    throw Error(ErrorKind::ShapeMismatch, "climatology and observations differ in cell count");
  }
  bool any_year = false;
  for (int y : period) any_year = any_year || observed.has_year(y);
  if (!any_year) throw Error(ErrorKind::MissingData, "no observed years overlap the period");

  Eigen::VectorXd mae = Eigen::VectorXd::Constant(clim.n_cells(),
                                                  std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index c = 0; c < clim.n_cells(); ++c) {
    double s = 0.0;
    int n = 0;
    for (int y : period) {
      if (!observed.has_year(y)) continue;
      const auto& obs = observed.at(c, y);
      const auto cd = clim.mean_date(c, y);
      if (!obs || !cd) continue;
      s += std::abs(static_cast<double>(date_diff(*cd, *obs)));
      ++n;
    }
    if (n > 0) mae[c] = s / n;
  }
  return mae;
}

ProbForecast climatology_prob_forecast(const OnsetClimatology& clim, Eigen::Index cell,
                                       const CalendarDate& init, const BinScheme& scheme,
                                       std::optional<CalendarDate> observed,
                                       std::optional<int> exclude_year) {
  if (!clim.defined(cell)) {
    throw Error(ErrorKind::MissingData, "no climatology at cell " + std::to_string(cell));
  }
  ProbForecast f;
  f.counts = Eigen::ArrayXi::Zero(scheme.n_bins());
  const long init_day = season_day(init);
  for (int y : clim.years()) {
    if (exclude_year && *exclude_year == y) continue;
    std::optional<long> lead;
    if (const auto& d = clim.members().at(cell, y)) lead = season_day(*d) - init_day;
    ++f.counts[scheme.bin_of_lead(lead)];
    ++f.members;
  }
  if (f.members == 0) throw Error(ErrorKind::EnsembleSize, "empty climatological ensemble");
  std::optional<long> obs_lead;
  if (observed) obs_lead = date_diff(*observed, init);
  f.truth_bin = scheme.bin_of_lead(obs_lead);
  return f;
}

}  // namespace onsetbench
