#include "catch_amalgamated.hpp"

#include <cstring>
#include <fstream>
#include <random>

#include "onsetbench/config.hpp"
#include "onsetbench/io.hpp"
#include "support.hpp"

using namespace onsetbench;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

FieldSeries<float> random_series(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<float> g(0.5f, 8.0f);
  const auto grid = RegularGrid::uniform(-10, 30, 5, 350, 370, 5);  // crosses the meridian
  FieldSeries<float>::Matrix m(37, grid.n_cells());
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (i % 97 == 0) ? NAN : g(rng);
  return {grid, CalendarDate(1999, 12, 30), Units::MillimetresPerDay, m};
}

std::string bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* kMinimal = R"({
  "observations": {"path": "rain.gsf", "years": [[1961, 2024]]},
  "models": [{"name": "m1", "ensemble_size": 4, "years": [[2019, 2024]],
              "forecast_path": "fc/{model}/{init}_{member}.gsf"}],
  "periods": ["recent"]
})";

}  // namespace

TEST_CASE("grid series round trip is bit-exact") {
  const auto dir = testing::scratch("gsf_roundtrip");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = random_series(seed);
    write_grid_series(s, dir / "a.gsf", "rain");
    const auto back = read_grid_series(dir / "a.gsf");
    CHECK(back.variable == "rain");
    CHECK(back.series.grid() == s.grid());
    CHECK(back.series.start_date() == s.start_date());
    CHECK(back.series.units() == s.units());
    REQUIRE(back.series.values().size() == s.values().size());
    for (Eigen::Index i = 0; i < s.values().size(); ++i) {
      const float a = s.values().data()[i], b = back.series.values().data()[i];
      if (std::isnan(a)) {
        CHECK(std::isnan(b));
      } else {
        CHECK(std::memcmp(&a, &b, sizeof a) == 0);
      }
    }
    write_grid_series(back.series, dir / "b.gsf", "rain");
    CHECK(bytes(dir / "a.gsf") == bytes(dir / "b.gsf"));
  }
}

TEST_CASE("grid series errors") {
  const auto dir = testing::scratch("gsf_errors");
  write_grid_series(random_series(9), dir / "ok.gsf", "rain");
  const std::string all = bytes(dir / "ok.gsf");

  std::ofstream(dir / "short.gsf", std::ios::binary) << all.substr(0, all.size() - 3);
  CHECK(kind_of([&] { read_grid_series(dir / "short.gsf"); }) == ErrorKind::LengthMismatch);
  std::ofstream(dir / "long.gsf", std::ios::binary) << all << "xx";
  CHECK(kind_of([&] { read_grid_series(dir / "long.gsf"); }) == ErrorKind::LengthMismatch);

  std::string v2 = all;
  const auto pos = v2.find("\"schema_version\":1");
  REQUIRE(pos != std::string::npos);
  v2.replace(pos, 18, "\"schema_version\":7");
  std::ofstream(dir / "v7.gsf", std::ios::binary) << v2;
  CHECK(kind_of([&] { read_grid_series(dir / "v7.gsf"); }) == ErrorKind::UnsupportedVersion);

  std::ofstream(dir / "magic.gsf", std::ios::binary) << "NOT-A-GSF\n{}\n";
  CHECK(kind_of([&] { read_grid_series(dir / "magic.gsf"); }) == ErrorKind::MalformedFile);
  CHECK(kind_of([&] { read_grid_series(dir / "absent.gsf"); }) == ErrorKind::Io);
}

TEST_CASE("CSV fixture ingestion") {
  const auto dir = testing::scratch("csv");
  const auto grid = RegularGrid::uniform(10, 20, 5, 70, 80, 5);
  write_text_file(dir / "ok.csv",
                  "date,lat_index,lon_index,value\n2020-06-01,0,0,1.5\n2020-06-01,1,1,2.5\n2020-06-03,0,1,0\n");
  const auto s = read_csv_series(dir / "ok.csv", grid);
  CHECK(s.n_days() == 3);
  int populated = 0;
  for (Eigen::Index i = 0; i < s.values().size(); ++i) populated += !std::isnan(s.values().data()[i]);
  CHECK(populated == 3);
  CHECK(s(0, 0) == 1.5);
  CHECK(s(2, 1) == 0.0);
  CHECK(std::isnan(s(1, 0)));

  write_text_file(dir / "dup.csv", "date,lat_index,lon_index,value\n2020-06-01,0,0,1\n2020-06-01,0,0,2\n");
  try {
    read_csv_series(dir / "dup.csv", grid);
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateKey);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  write_text_file(dir / "empty.csv", "");
  CHECK(kind_of([&] { read_csv_series(dir / "empty.csv", grid); }) == ErrorKind::MissingData);
  write_text_file(dir / "date.csv", "2020-13-01,0,0,1\n");
  CHECK(kind_of([&] { read_csv_series(dir / "date.csv", grid); }) == ErrorKind::ParseError);
  write_text_file(dir / "off.csv", "2020-01-01,5,0,1\n");
  CHECK_THROWS_AS(read_csv_series(dir / "off.csv", grid), Error);
}

TEST_CASE("minimal config gets defaults") {
  const auto cfg = parse_config(kMinimal, "/data");
  const auto& ev = cfg.evaluation;
  REQUIRE(ev.windows.size() == 2);
  CHECK(ev.windows[0].name == "medium");
  CHECK(ev.windows[1].last_lead == 30);
  CHECK(ev.windows[1].tolerance == 5);
  CHECK(ev.region("cmz").box.has_value());
  CHECK(ev.grid.n_cells() == 64);
  CHECK(ev.schedule.weekdays == std::vector<unsigned>{1, 4});
  CHECK(ev.mok_median == kMokMedian);
  CHECK(cfg.registry.model("m1").ensemble_size == 4);
  CHECK(cfg.registry.observations.path == std::filesystem::path("/data/rain.gsf"));
  CHECK(ev.period("recent").years == std::vector<int>{2019, 2020, 2021, 2022, 2023, 2024});
  CHECK(cfg.hash == fnv1a_hex(kMinimal));
  CHECK(cfg.hash.size() == 16);
}

TEST_CASE("four standard periods") {
  const std::string text = R"({"observations": {"path": "r.gsf", "years": [[1901, 2024]]},
                               "periods": ["recent", "extended", "all", "common"]})";
  const auto ev = parse_config(text, ".").evaluation;
  REQUIRE(ev.periods.size() == 4);
  CHECK(ev.period("recent").years == YearRange{2019, 2024}.years());
  auto ext = YearRange{1965, 1978}.years();
  for (int y = 2019; y <= 2024; ++y) ext.push_back(y);
  CHECK(ev.period("extended").years == ext);
  CHECK(ev.period("all").years == YearRange{1965, 2024}.years());
  CHECK(ev.period("common").years == YearRange{2004, 2021}.years());
}

TEST_CASE("config validation") {
  const std::string outside = R"({"observations": {"path": "r.gsf", "years": [[1970, 2020]]},
                                  "periods": ["extended"]})";
  try {
    parse_config(outside, ".");
    FAIL("accepted");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1965") != std::string::npos);
    CHECK(msg.find("2024") != std::string::npos);
    CHECK(msg.find("1970") == std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"observations": {"path": "r", "years": [[2000, 2001]]}, "tolerance": 3})", "."),
                  Error);
  CHECK_THROWS_AS(parse_config(R"({"observations": {"path": "r", "years": [[2001, 2000]]}})", "."), Error);
  CHECK_THROWS_AS(parse_config(R"({"observations": {"path": "r", "years": [[2000, 2001]], "unit": "mm"}})", "."),
                  Error);
  CHECK_THROWS_AS(parse_config(R"({"observations": {"path": "r", "years": [[2000, 2001]]},
                                   "models": [{"name": "climatology", "ensemble_size": 1, "years": [2000],
                                               "forecast_path": "x"}]})",
                               "."),
                  Error);
  CHECK_THROWS_AS(parse_config("{not json", "."), Error);
}

TEST_CASE("forecast path template") {
  CHECK(expand_forecast_path("{model}/{init}/m{member}.gsf", "ifs", CalendarDate(2020, 5, 4), 3) ==
        "ifs/2020-05-04/m3.gsf");
}
