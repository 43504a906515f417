#include "leadlag/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace leadlag {

MacdParams MacdParams::from_timescale(double timescale) {
  MacdParams p;
  p.fast_period = kDefaultFast * timescale;
  p.slow_period = kDefaultSlow * timescale;
  p.signal_period = kDefaultSignal * timescale;
  p.timescale = timescale;
  return p;
}

void MacdParams::validate() const {
  if (!(timescale > 0.0)) throw std::invalid_argument("MACD timescale must be positive");
  if (!(fast_period >= 1.0) || !(slow_period >= 1.0) || !(signal_period >= 1.0)) {
    throw std::invalid_argument(fmt::format("MACD periods must be >= 1 (got {}, {}, {})",
                                            fast_period, slow_period, signal_period));
  }
  if (!(fast_period < slow_period)) {
    throw std::invalid_argument("MACD fast period must be shorter than the slow period");
  }
}

IndicatorSeries ema(std::span<const double> prices, double period) {
  if (prices.empty()) throw std::invalid_argument("ema: empty input");
  if (!(period >= 1.0)) throw std::invalid_argument(fmt::format("ema: period {} < 1", period));
  const double k = 2.0 / (period + 1.0);
  IndicatorSeries out;
  out.values.resize(prices.size());
  double value = prices[0];
  out.values[0] = value;
  for (std::size_t i = 1; i < prices.size(); ++i) {
    value += k * (prices[i] - value);
    out.values[i] = value;
  }
  return out;
}

MacdResult macd(std::span<const double> prices, const MacdParams& params) {
  params.validate();
  if (!(static_cast<double>(prices.size()) > params.slow_period)) {
    throw std::invalid_argument(fmt::format("macd: series too short ({} bars, slow period {})",
                                            prices.size(), params.slow_period));
  }
  const IndicatorSeries fast = ema(prices, params.fast_period);
  const IndicatorSeries slow = ema(prices, params.slow_period);
  MacdResult r;
  r.macd_line.values.resize(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    r.macd_line.values[i] = fast.values[i] - slow.values[i];
  }
  r.signal_line = ema(r.macd_line.values, params.signal_period);
  return r;
}

IndicatorSeries atr(const CandleSeries& series, int period) {
  if (period < 1) throw std::invalid_argument("atr: period must be >= 1");
  const auto candles = series.candles();
  const std::size_t n = candles.size();
  std::vector<double> tr(n);
  tr[0] = candles[0].high - candles[0].low;
  for (std::size_t i = 1; i < n; ++i) {
    const double prev_close = candles[i - 1].close;
    tr[i] = std::max({candles[i].high - candles[i].low, std::abs(candles[i].high - prev_close),
                      std::abs(candles[i].low - prev_close)});
  }
  // Window sums are recomputed from scratch every `period` bars to keep the
  // running-sum drift bounded on long series.
  IndicatorSeries out;
  out.values.resize(n);
  const auto p = static_cast<std::size_t>(period);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += tr[i];
    if (i >= p) sum -= tr[i - p];
    if (i % p == 0 && i >= p) {
      sum = 0.0;
      for (std::size_t k = i + 1 - p; k <= i; ++k) sum += tr[k];
    }
    const std::size_t count = std::min(i + 1, p);
    out.values[i] = std::max(0.0, sum / static_cast<double>(count));
  }
  return out;
}

std::vector<SarState> sar_direction(const IndicatorSeries& macd_line,
                                    const IndicatorSeries& signal_line,
                                    const IndicatorSeries& atr_series, double delta_coeff,
                                    std::size_t first_index) {
  const std::size_t n = macd_line.size();
  if (signal_line.size() != n || atr_series.size() != n) {
    throw std::invalid_argument(fmt::format("sar_direction: misaligned lengths ({}, {}, {})", n,
                                            signal_line.size(), atr_series.size()));
  }
  if (!(delta_coeff >= 0.0)) throw std::invalid_argument("sar_direction: delta_coeff < 0");
  std::vector<SarState> states(n, SarState::Undetermined);
  SarState state = SarState::Undetermined;
  for (std::size_t i = first_index; i < n; ++i) {
    const double delta = delta_coeff * atr_series[i];
    const double diff = macd_line[i] - signal_line[i];
    if (diff > delta) {
      state = SarState::Up;
    } else if (-diff > delta) {
      state = SarState::Down;
    }
    states[i] = state;
  }
  return states;
}

}  // namespace leadlag
