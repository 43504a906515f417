#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "leadlag/market_data.hpp"

namespace leadlag {

/// Indicator values aligned 1:1 with the candle index. Entries before
/// `valid_from` are undefined.
struct IndicatorSeries {
  std::vector<double> values;
  std::size_t valid_from = 0;

  std::size_t size() const noexcept { return values.size(); }
  bool defined(std::size_t i) const noexcept { return i >= valid_from && i < values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// MACD periods. Periods are real valued so the timescale can vary
/// continuously.
struct MacdParams {
  static constexpr double kDefaultFast = 12.0;
  static constexpr double kDefaultSlow = 26.0;
  static constexpr double kDefaultSignal = 9.0;

  double fast_period = kDefaultFast;
  double slow_period = kDefaultSlow;
  double signal_period = kDefaultSignal;
  double timescale = 1.0;

  /// (12, 26, 9) scaled by a common factor.
  static MacdParams from_timescale(double timescale);

  /// Throws std::invalid_argument unless all periods are >= 1 and fast < slow.
  void validate() const;
};

enum class SarState { Undetermined, Up, Down };

struct MacdResult {
  IndicatorSeries macd_line;
  IndicatorSeries signal_line;
};

/// Exponential smoothing with k = 2/(period+1), seeded with the first price.
IndicatorSeries ema(std::span<const double> prices, double period);

/// macd = ema(fast) - ema(slow); signal = ema(macd, signal_period).
MacdResult macd(std::span<const double> prices, const MacdParams& params);

/// Simple moving average of the true range; shorter prefix averages while
/// fewer than `period` bars exist.
IndicatorSeries atr(const CandleSeries& series, int period = 100);

/// Thresholded stop-and-reverse direction. The state flips to Up when
/// macd - signal > delta_coeff * atr, to Down when signal - macd exceeds it,
/// and otherwise keeps its previous value. Indices before `first_index` are
/// Undetermined and do not participate.
std::vector<SarState> sar_direction(const IndicatorSeries& macd_line,
                                    const IndicatorSeries& signal_line,
                                    const IndicatorSeries& atr_series, double delta_coeff = 0.3,
                                    std::size_t first_index = 0);

}  // namespace leadlag
