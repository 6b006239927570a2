#include "catch_amalgamated.hpp"

#include <random>

#include "onsetbench/oracle.hpp"
#include "onsetbench/probabilistic.hpp"

using namespace onsetbench;
using Catch::Approx;

namespace {

Eigen::MatrixXd rowm(std::initializer_list<double> v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

Eigen::VectorXd ws(double w) { return Eigen::VectorXd::Constant(1, w); }

}  // namespace

TEST_CASE("bin scheme") {
  const BinScheme s(15, 5);
  CHECK(s.n_bins() == 5);
  CHECK(s.bin_of_lead(0) == 0);
  CHECK(s.bin_of_lead(-3) == 0);
  CHECK(s.bin_of_lead(1) == 1);
  CHECK(s.bin_of_lead(5) == 1);
  CHECK(s.bin_of_lead(6) == 2);
  CHECK(s.bin_of_lead(15) == 3);
  CHECK(s.bin_of_lead(16) == 4);
  CHECK(s.bin_of_lead(std::nullopt) == 4);
  CHECK_THROWS_AS(BinScheme(15, 4), Error);
  CHECK(BinScheme(30, 5).n_bins() == 8);
}

TEST_CASE("binning member onsets") {
  const CalendarDate init(2020, 6, 1);
  const BinScheme s(15, 5);
  using O = std::optional<CalendarDate>;
  std::vector<O> two = {date_add(init, 4), date_add(init, 4)};
  auto f = bin_member_onsets(two, init, s, date_add(init, 4));
  CHECK(f.probabilities().tail(4).isApprox(Eigen::ArrayXd::Map(std::vector<double>{1, 0, 0, 0}.data(), 4)));

  std::vector<O> four = {date_add(init, 3), date_add(init, 8), std::nullopt, std::nullopt};
  f = bin_member_onsets(four, init, s, date_add(init, 22));
  const Eigen::ArrayXd p = f.probabilities().tail(4);
  CHECK(p[0] == 0.25);
  CHECK(p[1] == 0.25);
  CHECK(p[2] == 0.0);
  CHECK(p[3] == 0.5);
  CHECK(f.truth_bin == s.beyond_bin());
  CHECK(f.counts[0] == 0);

  std::vector<O> early = {init};
  CHECK_THROWS_AS(bin_member_onsets(early, init, s, std::nullopt), Error);
}

TEST_CASE("fair Brier score hand cases") {
  CHECK(fair_brier_score(rowm({1, 0, 0, 0}), rowm({1, 0, 0, 0}), ws(2)) == 0.0);
  CHECK(fair_brier_score(rowm({.5, .5, 0, 0}), rowm({1, 0, 0, 0}), ws(2)) == 0.0);
  CHECK(fair_brier_score(rowm({.25, .75, 0, 0}), rowm({1, 0, 0, 0}), ws(4)) == Approx(0.25).margin(1e-15));
  CHECK_THROWS_AS(fair_brier_score(rowm({1, 0}), rowm({1, 0}), ws(1)), Error);
  CHECK_THROWS_AS(fair_brier_score(rowm({1, 0}), rowm({1, 0, 0}), ws(2)), Error);
  // oracle agrees on the same cases
  CHECK(oracle::fair_brier({{.25, .75, 0, 0}}, {{1, 0, 0, 0}}, {4}) == Approx(0.25).margin(1e-15));
}

TEST_CASE("fair RPS hand cases") {
  CHECK(fair_rps_score(rowm({1, 0, 0}), rowm({1, 0, 0}), ws(2)) == 0.0);
  CHECK(fair_rps_score(rowm({.5, .5, 0}), rowm({1, 0, 0}), ws(2)) == 0.0);
  CHECK(fair_rps_score(rowm({0, 0, 1}), rowm({1, 0, 0}), ws(2)) == Approx(2.0 / 3.0).margin(1e-15));
  CHECK(oracle::fair_rps({{0, 0, 1}}, {{1, 0, 0}}, {2}) == Approx(2.0 / 3.0).margin(1e-15));
}

TEST_CASE("AUC") {
  Eigen::MatrixXd y(3, 4), p(3, 4);
  y << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1;
  CHECK(roc_auc(y, y) == 1.0);
  p.setConstant(0.3);
  CHECK(roc_auc(p, y) == 0.5);
  CHECK(roc_auc(p, y, TieRule::Strict) == 0.0);
  CHECK_THROWS_AS(roc_auc(p, Eigen::MatrixXd::Zero(3, 4)), Error);
}

TEST_CASE("AUC matches pairwise enumeration on a 200-forecast pool") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_int_distribution<int> truth(0, 3);
  Eigen::MatrixXd p(200, 4), y = Eigen::MatrixXd::Zero(200, 4);
  for (int i = 0; i < 200; ++i) {
    int left = 4;
    for (int j = 0; j < 3; ++j) {
      const int c = std::min(left, count(rng));
      p(i, j) = c / 4.0;
      left -= c;
    }
    p(i, 3) = left / 4.0;
    y(i, truth(rng)) = 1.0;
  }
  std::vector<double> fp, fy;
  for (Eigen::Index c = 0; c < 4; ++c)
    for (Eigen::Index r = 0; r < 200; ++r) {
      fp.push_back(p(r, c));
      fy.push_back(y(r, c));
    }
  CHECK(std::abs(roc_auc(p, y) - oracle::auc(fp, fy)) <= 1e-12);
  CHECK(std::abs(roc_auc(p, y, TieRule::Strict) - oracle::auc(fp, fy, false)) <= 1e-12);
}

TEST_CASE("skill score") {
  CHECK(skill(0.2, 0.2) == 0.0);
  CHECK(skill(0.0, 0.2) == 1.0);
  CHECK(skill(0.4, 0.2) == -1.0);
  CHECK_THROWS_AS(skill(0.1, 0.0), Error);
}

TEST_CASE("reliability curve") {
  Eigen::MatrixXd p(2, 2);
  p << 1, 0, 0, 1;
  const auto pts = reliability_curve(p, p, uniform_probability_edges(10));
  CHECK(pts.front().count == 2);
  CHECK(pts.front().mean_probability == 0.0);
  CHECK(pts.front().observed_frequency == 0.0);
  CHECK(pts.back().count == 2);
  CHECK(pts.back().mean_probability == 1.0);
  CHECK(pts.back().observed_frequency == 1.0);
  CHECK_THROWS_AS(reliability_curve(p, p, Eigen::VectorXd::LinSpaced(3, 0.1, 1.0)), Error);
}

TEST_CASE("calibrated and overconfident forecasts") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> level(0, 10);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 20000;
  Eigen::VectorXd p(n), calibrated(n), over(n);
  for (int i = 0; i < n; ++i) {
    p[i] = level(rng) / 10.0;
    const double r = u(rng);
    calibrated[i] = r < p[i] ? 1.0 : 0.0;
    over[i] = r < p[i] / 2.0 ? 1.0 : 0.0;
  }
  const auto edges = uniform_probability_edges(10);
  for (const auto& pt : reliability_curve(p, calibrated, edges)) {
    if (pt.count == 0) continue;
    CHECK(std::abs(pt.observed_frequency - pt.mean_probability) <= 2.0 * pt.standard_error + 1e-12);
  }
  for (const auto& pt : reliability_curve(p, over, edges)) {
    if (pt.count == 0 || pt.mean_probability < 0.15) continue;
    CHECK(pt.observed_frequency < pt.mean_probability);
  }
}

TEST_CASE("pooled scores with a climatological reference") {
  const CalendarDate init(2020, 6, 1);
  const BinScheme s(15, 5);
  using O = std::optional<CalendarDate>;
  std::vector<O> good = {date_add(init, 3), date_add(init, 4)};
  std::vector<O> spread = {date_add(init, 3), date_add(init, 9), date_add(init, 13), std::nullopt};
  const std::vector<ProbForecast> model = {bin_member_onsets(good, init, s, date_add(init, 3))};
  const std::vector<ProbForecast> clim = {bin_member_onsets(spread, init, s, date_add(init, 3))};
  const auto sc = score_forecasts(model, clim);
  CHECK(sc.brier == 0.0);
  REQUIRE(sc.bss.has_value());
  CHECK(*sc.bss == 1.0);
  const auto self = score_forecasts(clim, clim);
  CHECK(*self.bss == 0.0);
  CHECK(*self.rpss == 0.0);
  CHECK(sc.n_forecasts == 1);
}
