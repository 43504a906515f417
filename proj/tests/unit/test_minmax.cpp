#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "leadlag/calibration.hpp"
#include "leadlag/error.hpp"
#include "leadlag/minmax.hpp"
#include "test_support.hpp"

using namespace leadlag;

namespace {

CandleSeries from_closes(const std::vector<double>& closes) {
  std::vector<Candle> c;
  for (std::size_t i = 0; i < closes.size(); ++i) {
    c.push_back(Candle{static_cast<EpochSeconds>(i) * 3600, closes[i], closes[i], closes[i],
                       closes[i], {}});
  }
  return CandleSeries("T", 3600, c);
}

}  // namespace

TEST_CASE("monotone and constant prices confirm no pair of extrema") {
  std::vector<double> up(2000);
  for (std::size_t i = 0; i < up.size(); ++i) up[i] = 100.0 + static_cast<double>(i);
  const MinMaxDetector rising(from_closes(up));
  CHECK(rising.scan(1.0).size() < 2);
  CHECK_THROWS_WITH_AS(rising.detect(1.0), doctest::Contains("fewer than 2 extrema"),
                       AnalysisError);

  const MinMaxDetector flat(from_closes(std::vector<double>(2000, 50.0)));
  CHECK(flat.scan(1.0).empty());
  CHECK_THROWS_WITH_AS(flat.detect(1.0), doctest::Contains("fewer than 2 extrema"),
                       AnalysisError);
}

TEST_CASE("timescale limits") {
  CHECK(MinMaxDetector::min_timescale() == doctest::Approx(1.0 / 9.0));
  const MinMaxDetector d(from_closes(std::vector<double>(100, 1.0)));
  CHECK(d.supports(1.0));
  CHECK_FALSE(d.supports(4.0));
  CHECK(d.scan(0.05).empty());
  CHECK_THROWS_AS(d.detect(0.05), AnalysisError);
  CHECK_THROWS_AS(d.detect(4.0), AnalysisError);
}

TEST_CASE("sinusoid extrema alternate near the true turning points") {
  testing::SinusoidSpec spec;
  spec.count = 4000;
  const CandleSeries s = testing::sinusoid_candles(spec);
  const MinMaxDetector detector(s);
  const CalibrationResult cal = calibrate_timescale(detector, 50.0 * 3600, TimeMode::Candles);
  const ExtremumSeries ex = detector.detect(cal.timescale);
  REQUIRE(ex.size() > 100);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const Extremum& e = ex[i];
    if (i > 0) CHECK(e.kind != ex[i - 1].kind);
    CHECK(e.confirm_time >= e.time);
    const double k = static_cast<double>(e.candle_index);
    // Peaks at k = 12.5 + 50 m, troughs at 37.5 + 50 m.
    const double phase = e.kind == ExtremumKind::Max ? 12.5 : 37.5;
    const double off = std::remainder(k - phase, 50.0);
    CHECK(std::abs(off) <= 3.0);
    if (e.kind == ExtremumKind::Max) {
      CHECK(e.price == s[e.candle_index].high);
    } else {
      CHECK(e.price == s[e.candle_index].low);
    }
  }
  CHECK(mean_wavelength(ex, s, TimeMode::Candles) == doctest::Approx(50.0 * 3600).epsilon(0.02));
}

TEST_CASE("mean wavelength examples") {
  const std::vector<EpochSeconds> four{0, 50, 100, 150};
  CHECK(mean_wavelength(four) == 100.0);
  const std::vector<EpochSeconds> two{0, 50};
  CHECK(mean_wavelength(two) == 100.0);
  const std::vector<EpochSeconds> one{7};
  CHECK_THROWS_AS(mean_wavelength(one), AnalysisError);
}

TEST_CASE("mean wavelength in candle and wall-clock time") {
  // Hourly candles with a 10-hour gap after index 2.
  std::vector<Candle> c;
  for (int i = 0; i < 8; ++i) {
    const EpochSeconds t = (i < 3 ? i : i + 10) * 3600;
    c.push_back(Candle{t, 1, 1, 1, 1, {}});
  }
  const CandleSeries s("G", 3600, c);
  std::vector<Extremum> e(2);
  e[0] = Extremum{ExtremumKind::Min, s[1].time, 1.0, s[1].time, 1, 1};
  e[1] = Extremum{ExtremumKind::Max, s[5].time, 1.0, s[5].time, 5, 5};
  const ExtremumSeries ex(e, 1.0, "G");
  CHECK(mean_wavelength(ex, s, TimeMode::Candles) == 2.0 * 4 * 3600);
  CHECK(mean_wavelength(ex, s, TimeMode::Seconds) == 2.0 * 14 * 3600);
}

TEST_CASE("rolling wavelength") {
  const auto even = testing::make_extrema({0, 7, 14, 21, 28}, ExtremumKind::Max);
  for (const auto& [t, v] : rolling_wavelength(even, 2)) CHECK(v == 14.0);

  const auto ex = testing::make_extrema({0, 10, 40, 45, 100}, ExtremumKind::Min);
  const auto whole = rolling_wavelength(ex, ex.size() - 1);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].first == 100);
  const std::vector<EpochSeconds> times{0, 10, 40, 45, 100};
  CHECK(whole[0].second == mean_wavelength(times));

  const auto r = rolling_wavelength(testing::make_extrema({0, 10, 40}, ExtremumKind::Min), 2);
  REQUIRE(r.size() == 1);
  CHECK(r[0].second == 40.0);
  CHECK_THROWS_AS(rolling_wavelength(ex, 5), AnalysisError);
}

TEST_CASE("extremum series invariants") {
  std::vector<Extremum> same(2);
  same[1].time = 5;
  same[1].confirm_time = 5;
  CHECK_THROWS_AS(ExtremumSeries(same, 1.0, "X"), std::invalid_argument);
  CHECK_THROWS_AS(testing::make_extrema({5, 5}, ExtremumKind::Min), std::invalid_argument);
}

TEST_CASE("extrema csv") {
  std::ostringstream out;
  write_extrema_csv(out, testing::make_extrema({10, 20}, ExtremumKind::Max));
  CHECK(out.str() == "kind,time,price,confirm_time,candle_index\nmax,10,2,10,0\nmin,20,1,20,1\n");
}

TEST_CASE("detection is deterministic across detector instances") {
  testing::RandomWalkSpec spec;
  spec.count = 3000;
  const CandleSeries s = testing::random_walk_candles(spec);
  const auto a = MinMaxDetector(s).scan(1.3);
  const auto b = detect_extrema(s, 1.3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
