#include "catch_amalgamated.hpp"

#include <random>

#include "onsetbench/climatology.hpp"
#include "onsetbench/synthetic.hpp"

using namespace onsetbench;
using Catch::Approx;

TEST_CASE("climatological mean date") {
  OnsetTable t({2001, 2002}, 1, OnsetVariant::MokFiltered);
  t.set(0, 2001, CalendarDate(2001, 6, 10));
  t.set(0, 2002, CalendarDate(2002, 6, 20));
  const OnsetClimatology c(t);
  CHECK(c.mean_date(0, 2024) == CalendarDate(2024, 6, 15));

  OnsetTable same({2001, 2002, 2003}, 1, OnsetVariant::MokFiltered);
  for (int y : {2001, 2002, 2003}) same.set(0, y, CalendarDate(y, 6, 18));
  const OnsetClimatology cs(same);
  CHECK(cs.mean_date(0, 2010) == CalendarDate(2010, 6, 18));
  const auto f = climatology_prob_forecast(cs, 0, CalendarDate(2010, 6, 1), BinScheme(15, 5), std::nullopt);
  CHECK(f.counts[4] == 3);  // lead 17 is beyond the 15-day window
  CHECK(f.members == 3);

  OnsetTable none({2001}, 1, OnsetVariant::MokFiltered);
  const OnsetClimatology cn(none);
  CHECK_FALSE(cn.defined(0));
  CHECK_FALSE(cn.mean_date(0, 2001).has_value());
  CHECK_THROWS_AS(climatology_prob_forecast(cn, 0, CalendarDate(2010, 6, 1), BinScheme(), std::nullopt), Error);
}

TEST_CASE("climatology of a synthetic archive matches a rescan") {
  SeasonSpec spec;
  spec.seed = 99;
  spec.false_start_rate = 0.4;
  spec.absent_rate = 0.05;
  spec.onset_spread_days = 9;
  const auto g = RegularGrid::uniform(16, 28, 4, 72, 84, 4);
  const auto a = generate_archive(spec, g, YearRange{1981, 2010});
  const auto clim = build_onset_climatology(a.rain, a.thresholds, YearRange{1981, 2010}.years());
  for (Eigen::Index c = 0; c < g.n_cells(); ++c) {
    double s = 0;
    int n = 0;
    for (int y = 1981; y <= 2010; ++y) {
      if (const auto& d = a.truth.at(c, y)) {
        s += static_cast<double>(date_diff(*d, CalendarDate(y, 3, 1)));
        ++n;
      }
    }
    REQUIRE(n > 0);
    CHECK(clim.mean_season_day()[c] == Approx(s / n).epsilon(1e-14));
  }
}

TEST_CASE("fixed climatology MAE") {
  OnsetTable clim_t({2001, 2002}, 1, OnsetVariant::MokFiltered);
  clim_t.set(0, 2001, CalendarDate(2001, 6, 12));
  clim_t.set(0, 2002, CalendarDate(2002, 6, 18));  // mean June 15
  const OnsetClimatology clim(clim_t);

  OnsetTable obs({2019, 2020}, 1, OnsetVariant::MokFiltered);
  obs.set(0, 2019, CalendarDate(2019, 6, 12));
  obs.set(0, 2020, CalendarDate(2020, 6, 20));
  CHECK(fixed_climatology_mae(clim, obs, {2019, 2020})[0] == Approx(4.0));

  OnsetTable equal({2019}, 1, OnsetVariant::MokFiltered);
  equal.set(0, 2019, CalendarDate(2019, 6, 15));
  CHECK(fixed_climatology_mae(clim, equal, {2019})[0] == 0.0);
  CHECK_THROWS_AS(fixed_climatology_mae(clim, equal, {1990}), Error);
}

TEST_CASE("climatological ensemble bins") {
  const CalendarDate init(2020, 6, 1);
  const BinScheme scheme(15, 5);
  OnsetTable t(YearRange{1901, 2024}.years(), 1, OnsetVariant::MokFiltered);
  for (int y = 1901; y <= 2024; ++y) t.set(0, y, with_year(date_add(init, 3), y));
  const auto f = climatology_prob_forecast(OnsetClimatology(t), 0, init, scheme, date_add(init, 3));
  CHECK(f.members == 124);
  CHECK(f.probabilities()[1] == 1.0);
  CHECK(f.probabilities().sum() == 1.0);
  CHECK(f.truth_bin == 1);

  OnsetTable half(YearRange{2001, 2010}.years(), 1, OnsetVariant::MokFiltered);
  for (int y = 2001; y <= 2010; ++y) half.set(0, y, CalendarDate(y, 6, y % 2 ? 1 : 9));
  const auto h = climatology_prob_forecast(OnsetClimatology(half), 0, CalendarDate(2020, 6, 1), scheme, std::nullopt);
  CHECK(h.probabilities()[0] == 0.5);
  CHECK(h.probabilities()[2] == 0.5);
  CHECK(h.truth_bin == scheme.beyond_bin());

  const auto loo = climatology_prob_forecast(OnsetClimatology(half), 0, CalendarDate(2020, 6, 1), scheme,
                                             std::nullopt, 2001);
  CHECK(loo.members == 9);
}

TEST_CASE("climatological ensemble matches a counting oracle") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> day(-10, 30);
  std::bernoulli_distribution gone(0.15);
  const BinScheme scheme(30, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const CalendarDate init(2022, 6, 6);
    OnsetTable t(YearRange{1961, 1990}.years(), 1, OnsetVariant::MokFiltered);
    std::vector<int> want(static_cast<std::size_t>(scheme.n_bins()), 0);
    for (int y = 1961; y <= 1990; ++y) {
      if (gone(rng)) {
        ++want.back();
        continue;
      }
      const int lead = day(rng);
      t.set(0, y, with_year(date_add(init, lead), y));
      const int bin = lead <= 0 ? 0 : lead > 30 ? scheme.beyond_bin() : 1 + (lead - 1) / 5;
      ++want[static_cast<std::size_t>(bin)];
    }
    const OnsetClimatology clim(t);
    if (!clim.defined(0)) continue;
    const auto f = climatology_prob_forecast(clim, 0, init, scheme, std::nullopt);
    for (int k = 0; k < scheme.n_bins(); ++k) CHECK(f.counts[k] == want[static_cast<std::size_t>(k)]);
  }
}
