#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "onsetbench/oracle.hpp"
#include "onsetbench/synthetic.hpp"
#include "support.hpp"

using namespace onsetbench;

namespace {

const RegularGrid kGrid = RegularGrid::uniform(10, 26, 4, 70, 90, 4);

}  // namespace

TEST_CASE("planted onsets are detected exactly") {
  SeasonSpec spec;
  spec.northwest_delay_per_degree = 0.5;
  spec.absent_rate = 0.1;
  spec.post_onset_dry_spell_prob = 0.3;
  spec.seed = 3;
  const auto arch = generate_archive(spec, kGrid, {2001, 2010});
  const auto years = YearRange{2001, 2010}.years();
  const auto detected = detect_onsets(arch.rain, arch.thresholds, years);
  int onsets = 0, absent = 0;
  for (Eigen::Index c = 0; c < kGrid.n_cells(); ++c) {
    for (int y : years) {
      CHECK(detected.at(c, y) == arch.truth.at(c, y));
      arch.truth.at(c, y) ? ++onsets : ++absent;
    }
  }
  CHECK(onsets > 0);
  CHECK(absent > 0);
}

TEST_CASE("false starts move the unfiltered onset but not the MOK-filtered one") {
  SeasonSpec spec;
  spec.false_start_rate = 1.0;
  spec.seed = 5;
  const auto arch = generate_season(spec, kGrid, 2015);
  for (Eigen::Index c = 0; c < kGrid.n_cells(); ++c) {
    const auto truth = arch.truth.at(c, 2015);
    REQUIRE(truth);
    const auto series = arch.rain.cell_series(c);
    const RainSeries rain{arch.rain.start_date(), series};
    CHECK(detect_onset_mok_filtered(rain, arch.thresholds.mm[c], 2015) == truth);
    const auto early = detect_first_wet_spell(rain, arch.thresholds.mm[c], CalendarDate(2015, 4, 1));
    REQUIRE(early);
    CHECK(*early < *truth);
    CHECK(early->month() == 5);
  }
}

TEST_CASE("generators are deterministic in the seed") {
  SeasonSpec spec;
  spec.seed = 11;
  spec.false_start_rate = 0.5;
  const auto a = generate_archive(spec, kGrid, {2019, 2020});
  const auto b = generate_archive(spec, kGrid, {2019, 2020});
  CHECK(a.rain.values().cwiseEqual(b.rain.values()).all());
  spec.seed = 12;
  const auto c = generate_archive(spec, kGrid, {2019, 2020});
  CHECK_FALSE(a.rain.values().cwiseEqual(c.rain.values()).all());

  const auto inits = InitializationSchedule().dates(2020);
  EnsembleSpec ens{3, 1.0, 2.0, 0.1, 46, 9};
  const auto e1 = generate_ensemble(ens, spec, a.truth, kGrid, inits);
  const auto e2 = generate_ensemble(ens, spec, a.truth, kGrid, inits);
  REQUIRE(e1.runs.size() == e2.runs.size());
  for (const auto& [init, members] : e1.runs) {
    REQUIRE(members.size() == 3);
    for (std::size_t m = 0; m < members.size(); ++m) {
      CHECK(members[m].values().cwiseEqual(e2.runs.at(init)[m].values()).all());
    }
  }
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("ensemble bias maps onto the scores") {
  SeasonSpec spec;
  spec.seed = 21;
  const int year = 2018;
  const auto arch = generate_season(spec, kGrid, year);
  const auto inits = InitializationSchedule().dates(year);
  const auto window = ForecastWindow::medium();

  const auto run = [&](double bias) {
    const auto set = generate_ensemble({1, bias, 0.0, 0.0, 46, 4}, spec, arch.truth, kGrid, inits);
    Ledger all;
    for (Eigen::Index c = 0; c < kGrid.n_cells(); ++c) {
      auto ev = evaluate_year(set, c, year, inits, window, arch.truth.at(c, year), arch.thresholds.mm[c]);
      all.insert(all.end(), ev.rows.begin(), ev.rows.end());
    }
    return all;
  };

  const auto perfect = aggregate_scores(run(0.0));
  CHECK(perfect.mae == 0.0);
  CHECK(perfect.far == 0.0);
  CHECK(perfect.mr == 0.0);
  CHECK(perfect.total_miss == 0.0);

  for (const auto& row : run(4.0)) {
    if (row.predicted) {
      CHECK(row.outcome == Outcome::FalsePositive);
      CHECK(row.abs_error == 4);
    }
  }
}

TEST_CASE("ensemble noise has the requested spread") {
  SeasonSpec spec;
  spec.onset_mean = {7, 10};
  spec.onset_spread_days = 0.0;
  spec.seed = 2;
  const auto grid = RegularGrid::uniform(18, 19, 1, 90, 91, 1);
  const auto arch = generate_season(spec, grid, 2010);
  const auto truth = *arch.truth.at(0, 2010);
  // Leads 1..30 put the truth at lead 15, seven sd from either edge.
  const std::vector<CalendarDate> inits = {date_add(truth, -15), date_add(truth, -16)};
  const ForecastWindow wide{"wide", 1, 30, 5};

  double sum = 0, sum2 = 0;
  long n = 0;
  for (std::uint64_t seed = 1; n < 1000; ++seed) {
    const auto set = generate_ensemble({100, 0.0, 2.0, 0.0, 46, seed}, spec, arch.truth, grid, inits);
    for (const auto& [init, members] : set.runs) {
      for (const auto& m : members) {
        const auto s = m.cell_series(0);
        const auto onset = extract_forecast_onset(RainSeries{m.start_date(), s}, init,
                                                  wide, arch.thresholds.mm[0]);
        REQUIRE(onset);
        const double d = static_cast<double>(date_diff(*onset, truth));
        sum += d;
        sum2 += d * d;
        ++n;
      }
    }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(mean) < 0.3);
  CHECK(sd == Catch::Approx(2.0).epsilon(0.15));
}

TEST_CASE("invalid generator settings are rejected") {
  SeasonSpec spec;
  spec.absent_rate = 1.5;
  CHECK_THROWS_AS(spec.validate(), Error);
  EnsembleSpec ens;
  ens.members = 0;
  CHECK_THROWS_AS(ens.validate(), Error);
}

TEST_CASE("onset oracles agree with the library") {
  std::mt19937_64 rng(77);
  std::gamma_distribution<double> g(0.6, 9.0);
  std::bernoulli_distribution dry(0.4);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(400);
    for (auto& v : x) v = dry(rng) ? 0.0 : g(rng);
    const double thr = 20.0 + (t % 30);
    const long from = t % 50;
    const auto rain = testing::one_cell(CalendarDate(2003, 3, 1), x);
    const auto s = rain.cell_series(0);
    const RainSeries rs{rain.start_date(), s};
    const long ref = oracle::first_wet_spell(x, from, thr);
    const auto lib = detect_first_wet_spell(rs, thr, date_add(rs.start, from));
    if (ref < 0) {
      CHECK_FALSE(lib);
    } else {
      REQUIRE(lib);
      CHECK(rs.index_of(*lib) == ref);
    }
  }
  std::vector<double> x(3 * 366);
  for (auto& v : x) v = dry(rng) ? 0.0 : g(rng);
  const auto rain = testing::one_cell(CalendarDate(2001, 1, 1), x);
  const auto s = rain.cell_series(0);
  const auto lib = wet_spell_threshold(RainSeries{rain.start_date(), s}, YearRange{2001, 2003});
  const auto ref = oracle::wet_spell_threshold(x, CalendarDate(2001, 1, 1), 2001, 2003);
  REQUIRE(lib);
  REQUIRE(ref);
  CHECK(*lib == Catch::Approx(*ref).epsilon(1e-12));
}

TEST_CASE("oracle fixtures") {
  const oracle::Table p{{1, 0}, {0.5, 0.5}};
  const oracle::Table y{{1, 0}, {1, 0}};
  CHECK(oracle::fair_brier({p[0]}, {y[0]}, {4}) == 0.0);
  CHECK(oracle::auc({0.9, 0.1}, {1, 0}) == 1.0);
  CHECK(oracle::auc({0.5, 0.5}, {1, 0}) == 0.5);
  CHECK(oracle::auc({0.5, 0.5}, {1, 0}, false) == 0.0);
  CHECK(oracle::quadrature_cell_area(0, 1, 0, 1) ==
        Catch::Approx(RegularGrid::uniform(0, 1, 1, 0, 1, 1).cell_areas()[0]).epsilon(1e-8));
}

TEST_CASE("cross-checks pass") {
  const auto checks = oracle::run_cross_checks(40, 99);
  REQUIRE(checks.size() >= 8);
  for (const auto& c : checks) {
    INFO(c.name << " max diff " << c.max_abs_diff);
    CHECK(c.passed);
    CHECK(c.trials > 0);
  }
}
