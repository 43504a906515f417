#include "leadlag/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "leadlag/error.hpp"

namespace leadlag {

std::string_view to_string(ExtremumKind kind) { return kind == ExtremumKind::Max ? "max" : "min"; }

ExtremumSeries::ExtremumSeries(std::vector<Extremum> extrema, double timescale,
                               std::string source_symbol)
    : extrema_(std::move(extrema)), timescale_(timescale), source_symbol_(std::move(source_symbol)) {
  for (std::size_t i = 0; i < extrema_.size(); ++i) {
    const Extremum& e = extrema_[i];
    if (e.confirm_time < e.time) {
      throw std::invalid_argument(fmt::format("extremum {}: confirmed before it occurred", i));
    }
    if (i == 0) continue;
    const Extremum& prev = extrema_[i - 1];
    if (e.kind == prev.kind) {
      throw std::invalid_argument(fmt::format("extremum {}: kinds do not alternate", i));
    }
    if (e.time <= prev.time) {
      throw std::invalid_argument(fmt::format("extremum {}: times not strictly increasing", i));
    }
  }
}

MinMaxDetector::MinMaxDetector(CandleSeries series, double delta_coeff)
    : series_(std::move(series)),
      closes_(series_.closes()),
      atr_(atr(series_, kAtrPeriod)),
      delta_coeff_(delta_coeff),
      content_hash_(data_hash(series_)) {
  if (!(delta_coeff_ >= 0.0)) throw std::invalid_argument("delta_coeff must be >= 0");
}

double MinMaxDetector::min_timescale() {
  return 1.0 / std::min({MacdParams::kDefaultFast, MacdParams::kDefaultSlow,
                         MacdParams::kDefaultSignal});
}

bool MinMaxDetector::supports(double timescale) const {
  return timescale >= min_timescale() &&
         static_cast<double>(series_.size()) > MacdParams::kDefaultSlow * timescale;
}

std::vector<Extremum> MinMaxDetector::scan(double timescale) const {
  if (!supports(timescale)) return {};
  const MacdParams params = MacdParams::from_timescale(timescale);
  const MacdResult lines = macd(closes_, params);
  // Bars before the slow EMA has had one period to settle do not drive the
  // SAR; seeded EMAs otherwise produce a spurious first phase.
  const auto warmup = static_cast<std::size_t>(std::ceil(params.slow_period));
  if (warmup >= series_.size()) return {};
  const std::vector<SarState> states =
      sar_direction(lines.macd_line, lines.signal_line, atr_, delta_coeff_, warmup);

  const auto candles = series_.candles();
  std::vector<Extremum> out;
  SarState phase = SarState::Undetermined;
  Extremum candidate;
  for (std::size_t i = warmup; i < candles.size(); ++i) {
    const SarState state = states[i];
    if (state != phase) {
      if (phase != SarState::Undetermined) {
        candidate.confirm_index = i;
        candidate.confirm_time = candles[i].time;
        out.push_back(candidate);
      }
      phase = state;
      candidate.kind = state == SarState::Up ? ExtremumKind::Max : ExtremumKind::Min;
      candidate.candle_index = i;
      candidate.time = candles[i].time;
      candidate.price = state == SarState::Up ? candles[i].high : candles[i].low;
      continue;
    }
    // Strict comparisons: the earliest candle attaining the extreme wins.
    if (phase == SarState::Up && candles[i].high > candidate.price) {
      candidate.candle_index = i;
      candidate.time = candles[i].time;
      candidate.price = candles[i].high;
    } else if (phase == SarState::Down && candles[i].low < candidate.price) {
      candidate.candle_index = i;
      candidate.time = candles[i].time;
      candidate.price = candles[i].low;
    }
  }
  return out;
}

ExtremumSeries MinMaxDetector::detect(double timescale) const {
  if (timescale < min_timescale()) {
    throw AnalysisError(fmt::format("{}: timescale {} below minimum {:.6f}", series_.symbol(),
                                    timescale, min_timescale()));
  }
  if (!supports(timescale)) {
    throw AnalysisError(fmt::format("{}: series too short ({} candles) for timescale {}",
                                    series_.symbol(), series_.size(), timescale));
  }
  std::vector<Extremum> found = scan(timescale);
  if (found.size() < 2) {
    throw AnalysisError(fmt::format("{}: fewer than 2 extrema at timescale {} (found {})",
                                    series_.symbol(), timescale, found.size()));
  }
  return ExtremumSeries(std::move(found), timescale, series_.symbol());
}

ExtremumSeries detect_extrema(const CandleSeries& series, double timescale, double delta_coeff) {
  return MinMaxDetector(series, delta_coeff).detect(timescale);
}

double mean_wavelength(const ExtremumSeries& extrema, const CandleSeries& series, TimeMode mode) {
  const std::size_t n = extrema.size();
  if (n < 2) throw AnalysisError("mean wavelength needs at least 2 extrema");
  const EpochSeconds span =
      series.elapsed(extrema[0].candle_index, extrema[n - 1].candle_index, mode);
  return 2.0 * static_cast<double>(span) / static_cast<double>(n - 1);
}

double mean_wavelength(std::span<const EpochSeconds> times) {
  if (times.size() < 2) throw AnalysisError("mean wavelength needs at least 2 extrema");
  return 2.0 * static_cast<double>(times.back() - times.front()) /
         static_cast<double>(times.size() - 1);
}

std::vector<std::pair<EpochSeconds, double>> rolling_wavelength(const ExtremumSeries& extrema,
                                                                std::size_t window) {
  if (window == 0) throw std::invalid_argument("rolling_wavelength: window must be >= 1");
  if (extrema.size() < window + 1) {
    throw AnalysisError(fmt::format("rolling_wavelength: {} extrema, need at least {}",
                                    extrema.size(), window + 1));
  }
  std::vector<std::pair<EpochSeconds, double>> out;
  out.reserve(extrema.size() - window);
  EpochSeconds gap_sum = 0;
  for (std::size_t s = 1; s < extrema.size(); ++s) {
    gap_sum += 2 * (extrema[s].time - extrema[s - 1].time);
    if (s > window) gap_sum -= 2 * (extrema[s - window].time - extrema[s - window - 1].time);
    if (s >= window) {
      out.emplace_back(extrema[s].time,
                       static_cast<double>(gap_sum) / static_cast<double>(window));
    }
  }
  return out;
}

void write_extrema_csv(std::ostream& sink, const ExtremumSeries& extrema) {
  sink << "kind,time,price,confirm_time,candle_index\n";
  for (const Extremum& e : extrema.extrema()) {
    sink << fmt::format("{},{},{},{},{}\n", to_string(e.kind), e.time, e.price, e.confirm_time,
                        e.candle_index);
  }
  if (!sink) throw std::runtime_error("write_extrema_csv: output sink failure");
}

}  // namespace leadlag
