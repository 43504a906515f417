#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leadlag/indicators.hpp"
#include "leadlag/market_data.hpp"

namespace leadlag {

enum class ExtremumKind { Min, Max };

std::string_view to_string(ExtremumKind kind);

/// A relevant local extremum. `time` is the open time of the extremum candle,
/// `confirm_time` the open time of the bar on which the SAR reversal fixed it.
struct Extremum {
  ExtremumKind kind = ExtremumKind::Min;
  EpochSeconds time = 0;
  double price = 0.0;  // high for maxima, low for minima
  EpochSeconds confirm_time = 0;
  std::size_t candle_index = 0;
  std::size_t confirm_index = 0;

  friend bool operator==(const Extremum&, const Extremum&) = default;
};

/// Alternating extrema with strictly increasing times (the MinMax process).
/// The constructor enforces both invariants and confirm_time >= time.
class ExtremumSeries {
 public:
  ExtremumSeries(std::vector<Extremum> extrema, double timescale, std::string source_symbol);

  std::span<const Extremum> extrema() const noexcept { return extrema_; }
  std::size_t size() const noexcept { return extrema_.size(); }
  const Extremum& operator[](std::size_t i) const { return extrema_[i]; }
  double timescale() const noexcept { return timescale_; }
  const std::string& source_symbol() const noexcept { return source_symbol_; }

 private:
  std::vector<Extremum> extrema_;
  double timescale_;
  std::string source_symbol_;
};

/// Runs the MinMax process on one series for many timescales. The ATR, which
/// does not depend on the timescale, is computed once.
class MinMaxDetector {
 public:
  static constexpr int kAtrPeriod = 100;
  static constexpr double kDefaultDeltaCoeff = 0.3;

  explicit MinMaxDetector(CandleSeries series, double delta_coeff = kDefaultDeltaCoeff);

  const CandleSeries& series() const noexcept { return series_; }
  double delta_coeff() const noexcept { return delta_coeff_; }
  const std::string& content_hash() const noexcept { return content_hash_; }

  /// Smallest timescale for which all MACD periods are >= 1.
  static double min_timescale();

  /// True when the series is longer than the slow-EMA warm-up.
  bool supports(double timescale) const;

  /// Confirmed extrema, possibly fewer than two. Returns an empty list when
  /// the timescale is invalid or the series is too short for it.
  std::vector<Extremum> scan(double timescale) const;

  /// Throws AnalysisError when the series is too short or fewer than two
  /// extrema are confirmed.
  ExtremumSeries detect(double timescale) const;

 private:
  CandleSeries series_;
  std::vector<double> closes_;
  IndicatorSeries atr_;
  double delta_coeff_;
  std::string content_hash_;
};

/// One-shot convenience wrapper around MinMaxDetector.
ExtremumSeries detect_extrema(const CandleSeries& series, double timescale,
                              double delta_coeff = MinMaxDetector::kDefaultDeltaCoeff);

/// 2 (t_N - t_1) / (N - 1) with t measured in `mode` on the candle series.
/// Throws AnalysisError if N < 2.
double mean_wavelength(const ExtremumSeries& extrema, const CandleSeries& series, TimeMode mode);

/// Same quantity on raw extremum times (wall clock).
double mean_wavelength(std::span<const EpochSeconds> times);

/// Moving average of 2 (t_{i+1} - t_i) over the trailing `window` gaps,
/// stamped with the time of the newest extremum in the window.
std::vector<std::pair<EpochSeconds, double>> rolling_wavelength(const ExtremumSeries& extrema,
                                                                std::size_t window);

/// `kind,time,price,confirm_time,candle_index`
void write_extrema_csv(std::ostream& sink, const ExtremumSeries& extrema);

}  // namespace leadlag
