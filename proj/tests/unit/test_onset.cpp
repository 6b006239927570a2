#include "catch_amalgamated.hpp"

#include <random>

#include "onsetbench/onset.hpp"
#include "onsetbench/oracle.hpp"
#include "support.hpp"

using namespace onsetbench;
using Catch::Approx;

namespace {

std::vector<double> year_of(int year, double v) {
  return std::vector<double>(static_cast<std::size_t>(date_diff(CalendarDate(year, 12, 31), CalendarDate(year, 1, 1)) + 1), v);
}

void wet(std::vector<double>& x, const CalendarDate& start, const CalendarDate& from, int days, double mm) {
  const long i0 = date_diff(from, start);
  for (long i = i0; i < i0 + days; ++i) x[static_cast<std::size_t>(i)] = mm;
}

}  // namespace

TEST_CASE("wet-spell threshold") {
  const CalendarDate start(2000, 1, 1);
  std::vector<double> x;
  for (int y = 2000; y <= 2002; ++y) {
    const auto v = year_of(y, 10.0);
    x.insert(x.end(), v.begin(), v.end());
  }
  const auto f = testing::one_cell(start, x);
  const auto t = compute_wet_spell_threshold(f, YearRange{2000, 2002});
  CHECK(t.mm[0] == Approx(50.0));

  const auto dry = testing::one_cell(start, std::vector<double>(x.size(), 0.0));
  CHECK(std::isnan(compute_wet_spell_threshold(dry, YearRange{2000, 2002}).mm[0]));
  CHECK_THROWS_AS(compute_wet_spell_threshold(f, YearRange{2000, 2003}), Error);
  CHECK_THROWS_AS(compute_wet_spell_threshold(f, YearRange{2001, 2000}), Error);
}

TEST_CASE("wet-spell threshold matches the exhaustive oracle") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution rainy(0.4);
  std::gamma_distribution<double> amount(0.8, 9.0);
  const CalendarDate start(1990, 1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(date_diff(CalendarDate(1994, 12, 31), start) + 1));
    for (auto& v : x) v = rainy(rng) ? amount(rng) : 0.3 * amount(rng) / 9.0;
    if (trial % 4 == 0) x[200] = NAN;
    const auto got = wet_spell_threshold(RainSeries{start, x}, YearRange{1990, 1994});
    const auto want = oracle::wet_spell_threshold(x, start, 1990, 1994);
    REQUIRE(got.has_value() == want.has_value());
    CHECK(std::abs(*got - *want) <= 1e-12);
  }
}

TEST_CASE("first wet spell") {
  const CalendarDate s(2020, 4, 1);
  std::vector<double> x = {0, 0, 2, 10, 10, 10, 10, 0, 0, 0, 0, 0, 0, 0};
  CHECK(detect_first_wet_spell(RainSeries{s, x}, 40, s) == date_add(s, 2));  // day 3
  CHECK_FALSE(detect_first_wet_spell(RainSeries{s, x}, 50, s).has_value());
  std::vector<double> zeros(30, 0.0);
  CHECK_FALSE(detect_first_wet_spell(RainSeries{s, zeros}, 5, s).has_value());
  // A missing day inside a window disqualifies it.
  x[4] = NAN;
  CHECK_FALSE(detect_first_wet_spell(RainSeries{s, x}, 40, s).has_value());
  CHECK_THROWS_AS(detect_first_wet_spell(RainSeries{s, x}, 40, date_add(s, -1)), Error);
}

TEST_CASE("first wet spell matches the oracle scan") {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution rainy(0.3);
  std::exponential_distribution<double> amount(0.1);
  const CalendarDate s(2010, 5, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(80);
    for (auto& v : x) v = rainy(rng) ? amount(rng) : 0.0;
    const double thr = 20.0 + trial % 40;
    const long from = trial % 7;
    const auto got = detect_first_wet_spell(RainSeries{s, x}, thr, date_add(s, from));
    const long want = oracle::first_wet_spell(x, from, thr);
    CHECK((got ? date_diff(*got, s) : -1) == want);
  }
}

TEST_CASE("Moron-Robertson onset") {
  const CalendarDate apr1(2020, 4, 1);
  std::vector<double> x(160, 0.0);
  for (int d = 10; d <= 14; ++d) x[d - 1] = 10.0;  // day 10 spell
  for (int d = 31; d <= 39; ++d) x[d - 1] = 0.5;
  for (int d = 40; d <= 160; ++d) x[d - 1] = 10.0;
  const auto r = detect_onset_moron_robertson(RainSeries{apr1, x}, 40.0, apr1);
  REQUIRE(r.status == DetectionStatus::Found);
  CHECK(*r.date == date_add(apr1, 39));  // day 40

  const std::vector<double> heavy(120, 10.0);
  const auto h = detect_onset_moron_robertson(RainSeries{apr1, heavy}, 40.0, apr1);
  CHECK(h.date == apr1);

  // Not enough data after the candidate to rule out a dry spell.
  const std::vector<double> shorty(20, 10.0);
  CHECK(detect_onset_moron_robertson(RainSeries{apr1, shorty}, 40.0, apr1).status == DetectionStatus::Undecidable);
}

TEST_CASE("MOK-filtered onset") {
  const CalendarDate jan1(2021, 1, 1);
  auto x = year_of(2021, 0.0);
  wet(x, jan1, CalendarDate(2021, 5, 20), 5, 10.0);
  CHECK_FALSE(detect_onset_mok_filtered(RainSeries{jan1, x}, 40.0, 2021).has_value());
  wet(x, jan1, CalendarDate(2021, 6, 10), 5, 10.0);
  CHECK(detect_onset_mok_filtered(RainSeries{jan1, x}, 40.0, 2021) == CalendarDate(2021, 6, 10));
  const auto heavy = year_of(2021, 10.0);
  CHECK(detect_onset_mok_filtered(RainSeries{jan1, heavy}, 40.0, 2021) == CalendarDate(2021, 6, 3));
}

TEST_CASE("onset table bookkeeping") {
  OnsetTable t({2001, 2002}, 3, OnsetVariant::MokFiltered);
  t.set(1, 2002, CalendarDate(2002, 6, 20));
  CHECK(t.at(1, 2002) == CalendarDate(2002, 6, 20));
  CHECK_FALSE(t.at(0, 2001).has_value());
  CHECK_THROWS_AS(t.set(1, 2001, CalendarDate(2002, 6, 20)), Error);
  CHECK_THROWS_AS(t.at(3, 2001), Error);
  CHECK_THROWS_AS(t.at(0, 2003), Error);
  CHECK(t.records().size() == 6);
}

TEST_CASE("Webster-Yang index") {
  const auto g = RegularGrid::uniform(-5, 25, 5, 35, 115, 5);
  const CalendarDate s(2001, 3, 1);
  using M = DailyFieldSeries::Matrix;
  const DailyFieldSeries a(g, s, Units::MetresPerSecond, M::Constant(40, g.n_cells(), 20.0));
  const DailyFieldSeries b(g, s, Units::MetresPerSecond, M::Constant(40, g.n_cells(), 5.0));
  const auto w = compute_wyi(a, b);
  CHECK((w.values.array() - 15.0).abs().maxCoeff() < 1e-12);
  CHECK(compute_wyi(a, a).values.cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 10);
  M ra(10, g.n_cells()), rb(10, g.n_cells());
  for (Eigen::Index i = 0; i < ra.size(); ++i) {
    ra.data()[i] = n(rng);
    rb.data()[i] = n(rng);
  }
  const DailyFieldSeries fa(g, s, Units::MetresPerSecond, ra), fb(g, s, Units::MetresPerSecond, rb);
  const auto wr = compute_wyi(fa, fb);
  const auto box = RegionSpec::from_box("b", g, kWebsterYangBox);
  for (Eigen::Index t = 0; t < 10; ++t) {
    CHECK(std::abs(wr.values[t] - (area_weighted_mean(fa, box, t) - area_weighted_mean(fb, box, t))) <= 1e-12);
  }
  const DailyFieldSeries rain(g, s, Units::MillimetresPerDay, M::Constant(40, g.n_cells(), 5.0));
  CHECK_THROWS_AS(compute_wyi(rain, b), Error);
}

TEST_CASE("WYI onset") {
  const CalendarDate apr1(2001, 4, 1);
  WyiSeries ramp{apr1, Eigen::VectorXd(183), 0.0};
  for (Eigen::Index k = 0; k < ramp.values.size(); ++k) ramp.values[k] = -10.0 + 40.0 * static_cast<double>(k) / 90.0;
  long scan = -1;
  for (long t = 6; t < ramp.values.size(); ++t) {
    double m = 0;
    for (long k = t - 6; k <= t; ++k) m += ramp.values[k];
    if (m / 7.0 >= 0.0) {
      scan = t;
      break;
    }
  }
  CHECK(scan == 26);  // trailing mean is v(t-3) >= 0 first at t = 26
  CHECK(wyi_onset(ramp, 2001) == date_add(apr1, scan));

  WyiSeries low{apr1, Eigen::VectorXd::Constant(183, -1.0), 0.0};
  CHECK_FALSE(wyi_onset(low, 2001).has_value());
  WyiSeries high{apr1, Eigen::VectorXd::Constant(183, 1.0), 0.0};
  CHECK(wyi_onset(high, 2001) == date_add(apr1, 6));
  WyiSeries unref{apr1, Eigen::VectorXd::Constant(183, 1.0), std::nullopt};
  CHECK_THROWS_AS(wyi_onset(unref, 2001), Error);

  WyiSeries spin{CalendarDate(2001, 3, 1), Eigen::VectorXd::Constant(240, 1.0), std::nullopt};
  spin.reference = wyi_reference(spin, {2001});
  CHECK(wyi_onset(spin, 2001) == apr1);
}
