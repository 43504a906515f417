#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace leadlag {

/// Epoch seconds (UTC) or a duration in seconds.
using EpochSeconds = std::int64_t;

/// How elapsed time between two candles is measured.
///  Candles: number of bars times the bar duration, exchange closures ignored.
///  Seconds: wall clock difference of the bar open times.
enum class TimeMode { Candles, Seconds };

std::string_view to_string(TimeMode mode);
TimeMode time_mode_from_string(std::string_view text);

struct Candle {
  EpochSeconds time = 0;  // bar open time, UTC
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::optional<double> volume;

  friend bool operator==(const Candle&, const Candle&) = default;
};

/// Immutable, validated OHLC series on a fixed bar size. Gaps between bars
/// (exchange closures) are allowed, overlapping bars are not.
class CandleSeries {
 public:
  CandleSeries(std::string symbol, EpochSeconds bar_duration,
               std::vector<Candle> candles);

  const std::string& symbol() const noexcept { return symbol_; }
  EpochSeconds bar_duration() const noexcept { return bar_duration_; }
  std::span<const Candle> candles() const noexcept { return candles_; }
  std::size_t size() const noexcept { return candles_.size(); }
  const Candle& operator[](std::size_t i) const { return candles_[i]; }
  EpochSeconds first_time() const { return candles_.front().time; }
  EpochSeconds last_time() const { return candles_.back().time; }

  std::vector<double> closes() const;

  /// Elapsed time from candle i to candle j (i <= j), in seconds.
  /// Throws std::out_of_range for invalid indices.
  EpochSeconds elapsed(std::size_t i, std::size_t j, TimeMode mode) const;

  /// Candles with first <= time <= last. Throws DataError if none remain.
  CandleSeries between(EpochSeconds first, EpochSeconds last) const;

  friend bool operator==(const CandleSeries&, const CandleSeries&) = default;

 private:
  std::string symbol_;
  EpochSeconds bar_duration_;
  std::vector<Candle> candles_;
};

/// Column reference by header name or by zero-based position.
using ColumnRef = std::variant<std::string, std::size_t>;

struct ColumnSchema {
  bool has_header = true;
  ColumnRef time = std::string("time");
  ColumnRef open = std::string("open");
  ColumnRef high = std::string("high");
  ColumnRef low = std::string("low");
  ColumnRef close = std::string("close");
  // Optional: a missing volume column is not an error.
  std::optional<ColumnRef> volume = ColumnRef(std::string("volume"));

  /// Headerless `time,open,high,low,close[,volume]`.
  static ColumnSchema positional();
};

/// Parses CSV candles. Throws DataError on malformed rows (with the 1-based
/// line number), non-increasing timestamps, overlapping bars, OHLC violations
/// or empty input.
CandleSeries load_candles(std::istream& source, const ColumnSchema& schema,
                          EpochSeconds bar_duration, std::string symbol = {});
CandleSeries load_candles_file(const std::string& path, const ColumnSchema& schema,
                               EpochSeconds bar_duration, std::string symbol = {});

/// Writes `time,open,high,low,close[,volume]` with epoch times and
/// shortest round-trip decimal formatting.
void write_candles(std::ostream& sink, const CandleSeries& series);

/// Integer epoch seconds or `YYYY-MM-DDTHH:MM:SSZ`.
std::optional<EpochSeconds> parse_timestamp(std::string_view text);

/// FNV-1a over the symbol-independent content (bar size and OHLCV values).
std::string data_hash(const CandleSeries& series);

/// Restricts both series to the time span they share.
/// Throws AnalysisError("no overlapping span") when they are disjoint.
std::pair<CandleSeries, CandleSeries> common_span(const CandleSeries& a,
                                                  const CandleSeries& b);

}  // namespace leadlag
