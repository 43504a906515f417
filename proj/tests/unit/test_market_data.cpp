#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "leadlag/error.hpp"
#include "leadlag/market_data.hpp"
#include "test_support.hpp"

using namespace leadlag;

namespace {

const char* kCsv =
    "time,open,high,low,close,volume\n"
    "2020-01-01T00:00:00Z,10,12,9,11,100\n"
    "2020-01-01T01:00:00Z,11,13,10,12,50\n"
    "2020-01-01T03:00:00Z,12,12.5,11,11.5,20\n";

CandleSeries parse(const std::string& text, ColumnSchema schema = {}) {
  std::istringstream in(text);
  return load_candles(in, schema, 3600, "T");
}

std::string error_of(const std::string& text, ColumnSchema schema = {}) {
  try {
    parse(text, schema);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("header csv with ISO timestamps and a weekend-style gap") {
  const CandleSeries s = parse(kCsv);
  REQUIRE(s.size() == 3);
  CHECK(s[0].time == testing::kStart);
  CHECK(s[2].time == testing::kStart + 3 * 3600);
  CHECK(s[1].volume.value() == 50.0);
  CHECK(s.elapsed(0, 2, TimeMode::Candles) == 2 * 3600);
  CHECK(s.elapsed(0, 2, TimeMode::Seconds) == 3 * 3600);
  CHECK_THROWS_AS(s.elapsed(2, 1, TimeMode::Seconds), std::out_of_range);
  CHECK_THROWS_AS(s.elapsed(0, 3, TimeMode::Seconds), std::out_of_range);
}

TEST_CASE("columns resolve by name in any order and volume is optional") {
  const CandleSeries s = parse(
      "close,low,high,open,time\n"
      "11,9,12,10,1577836800\n"
      "12,10,13,11,1577840400\n");
  REQUIRE(s.size() == 2);
  CHECK(s[0].open == 10.0);
  CHECK(s[0].close == 11.0);
  CHECK_FALSE(s[0].volume.has_value());
}

TEST_CASE("headerless positional rows") {
  const CandleSeries s = parse("1577836800,10,12,9,11\n1577840400,11,13,10,12\n",
                               ColumnSchema::positional());
  CHECK(s.size() == 2);
  CHECK(s[1].high == 13.0);
}

TEST_CASE("errors name the row and the problem") {
  CHECK(error_of("time,open,high,low,close\n1577836800,10,12,9\n").find("row 2") !=
        std::string::npos);
  CHECK(error_of("time,open,high,low,close\n1577836800,10,12,9,x\n").find("malformed") !=
        std::string::npos);
  CHECK(error_of("time,open,high,low,close\n1577840400,10,12,9,11\n1577836800,10,12,9,11\n")
            .find("non-increasing timestamps") != std::string::npos);
  CHECK(error_of("time,open,high,low,close\n1577836800,10,9,8,11\n").find("OHLC") !=
        std::string::npos);
  CHECK(error_of("time,open,high,low,close\n").find("empty input") != std::string::npos);
  CHECK(error_of("").find("empty input") != std::string::npos);
}

TEST_CASE("overlapping bars are rejected") {
  std::vector<Candle> c{{0, 1, 1, 1, 1, {}}, {1800, 1, 1, 1, 1, {}}};
  CHECK_THROWS_AS(CandleSeries("X", 3600, c), DataError);
}

TEST_CASE("timestamp parsing") {
  CHECK(parse_timestamp("1577836800") == testing::kStart);
  CHECK(parse_timestamp("2020-01-01T00:00:00Z") == testing::kStart);
  CHECK(parse_timestamp("2020-02-29T12:30:15Z") == testing::kStart + 59 * 86400 + 45015);
  CHECK_FALSE(parse_timestamp("2020-13-01T00:00:00Z").has_value());
  CHECK_FALSE(parse_timestamp("yesterday").has_value());
}

TEST_CASE("write and reload round-trips exactly") {
  testing::SinusoidSpec spec;
  spec.count = 500;
  const CandleSeries s = testing::sinusoid_candles(spec);
  std::stringstream buf;
  write_candles(buf, s);
  const CandleSeries back = load_candles(buf, ColumnSchema{}, s.bar_duration(), s.symbol());
  CHECK(back == s);
}

TEST_CASE("data hash ignores the symbol and sees every price") {
  const CandleSeries a = parse(kCsv);
  const CandleSeries b("other", 3600, std::vector<Candle>(a.candles().begin(), a.candles().end()));
  CHECK(data_hash(a) == data_hash(b));
  std::vector<Candle> c(a.candles().begin(), a.candles().end());
  c[1].close = 12.25;
  CHECK(data_hash(a) != data_hash(CandleSeries("T", 3600, c)));
}

TEST_CASE("common span and between") {
  testing::SinusoidSpec spec;
  spec.count = 100;
  const CandleSeries a = testing::sinusoid_candles(spec);
  const CandleSeries b = a.between(a[10].time, a[60].time);
  CHECK(b.size() == 51);
  const auto [x, y] = common_span(a, b);
  CHECK(x.first_time() == b.first_time());
  CHECK(x.last_time() == b.last_time());
  CHECK(y.size() == b.size());
  const CandleSeries late = a.between(a[70].time, a[99].time);
  CHECK_THROWS_AS(common_span(b, late), AnalysisError);
}
