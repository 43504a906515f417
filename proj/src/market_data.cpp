#include "leadlag/market_data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "leadlag/error.hpp"

namespace leadlag {

std::string_view to_string(TimeMode mode) {
  return mode == TimeMode::Candles ? "candles" : "seconds";
}

TimeMode time_mode_from_string(std::string_view text) {
  if (text == "candles") return TimeMode::Candles;
  if (text == "seconds") return TimeMode::Seconds;
  throw std::invalid_argument(fmt::format("unknown time mode '{}'", text));
}

CandleSeries::CandleSeries(std::string symbol, EpochSeconds bar_duration,
                           std::vector<Candle> candles)
    : symbol_(std::move(symbol)), bar_duration_(bar_duration), candles_(std::move(candles)) {
  if (bar_duration_ <= 0) throw DataError("bar duration must be positive");
  if (candles_.empty()) throw DataError("empty input: no candles");
  for (std::size_t i = 0; i < candles_.size(); ++i) {
    const Candle& c = candles_[i];
    if (!std::isfinite(c.open) || !std::isfinite(c.high) || !std::isfinite(c.low) ||
        !std::isfinite(c.close)) {
      throw DataError(fmt::format("candle {}: non-finite price", i));
    }
    if (c.low > c.high || c.low > std::min(c.open, c.close) ||
        c.high < std::max(c.open, c.close)) {
      throw DataError(fmt::format("candle {}: OHLC invariant violated (o={} h={} l={} c={})", i,
                                  c.open, c.high, c.low, c.close));
    }
    if (c.volume && *c.volume < 0.0) {
      throw DataError(fmt::format("candle {}: negative volume", i));
    }
    if (i > 0) {
      const EpochSeconds prev = candles_[i - 1].time;
      if (c.time <= prev) {
        throw DataError(fmt::format("candle {}: non-increasing timestamps ({} after {})", i,
                                    c.time, prev));
      }
      if (c.time < prev + bar_duration_) {
        throw DataError(fmt::format("candle {}: overlaps previous bar ({} < {} + {})", i, c.time,
                                    prev, bar_duration_));
      }
    }
  }
}

std::vector<double> CandleSeries::closes() const {
  std::vector<double> out;
  out.reserve(candles_.size());
  for (const Candle& c : candles_) out.push_back(c.close);
  return out;
}

EpochSeconds CandleSeries::elapsed(std::size_t i, std::size_t j, TimeMode mode) const {
  if (i > j || j >= candles_.size()) {
    throw std::out_of_range(
        fmt::format("elapsed: indices ({}, {}) out of range for {} candles", i, j, size()));
  }
  if (mode == TimeMode::Candles) return static_cast<EpochSeconds>(j - i) * bar_duration_;
  return candles_[j].time - candles_[i].time;
}

CandleSeries CandleSeries::between(EpochSeconds first, EpochSeconds last) const {
  auto lo = std::lower_bound(candles_.begin(), candles_.end(), first,
                             [](const Candle& c, EpochSeconds t) { return c.time < t; });
  auto hi = std::upper_bound(candles_.begin(), candles_.end(), last,
                             [](EpochSeconds t, const Candle& c) { return t < c.time; });
  if (lo >= hi) throw DataError(fmt::format("{}: no candles in [{}, {}]", symbol_, first, last));
  return CandleSeries(symbol_, bar_duration_, std::vector<Candle>(lo, hi));
}

ColumnSchema ColumnSchema::positional() {
  ColumnSchema s;
  s.has_header = false;
  s.time = std::size_t{0};
  s.open = std::size_t{1};
  s.high = std::size_t{2};
  s.low = std::size_t{3};
  s.close = std::size_t{4};
  s.volume = ColumnRef(std::size_t{5});
  return s;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

// Column positions after resolving names against the header.
struct ResolvedColumns {
  std::array<std::size_t, 5> ohlc{};  // time, open, high, low, close
  std::optional<std::size_t> volume;
};

std::optional<std::size_t> resolve(const ColumnRef& ref,
                                   const std::vector<std::string_view>* header) {
  if (const auto* pos = std::get_if<std::size_t>(&ref)) return *pos;
  const std::string& name = std::get<std::string>(ref);
  if (header == nullptr) {
    // Headerless input: a numeric name is a position.
    return parse_int<std::size_t>(name);
  }
  auto it = std::find(header->begin(), header->end(), name);
  if (it == header->end()) return std::nullopt;
  return static_cast<std::size_t>(it - header->begin());
}

ResolvedColumns resolve_columns(const ColumnSchema& schema,
                                const std::vector<std::string_view>* header) {
  ResolvedColumns out;
  const std::array<const ColumnRef*, 5> refs = {&schema.time, &schema.open, &schema.high,
                                                &schema.low, &schema.close};
  static constexpr std::array<const char*, 5> names = {"time", "open", "high", "low", "close"};
  for (std::size_t k = 0; k < refs.size(); ++k) {
    auto pos = resolve(*refs[k], header);
    if (!pos) throw DataError(fmt::format("schema: cannot resolve required column '{}'", names[k]));
    out.ohlc[k] = *pos;
  }
  if (schema.volume) out.volume = resolve(*schema.volume, header);
  return out;
}

}  // namespace

std::optional<EpochSeconds> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (auto epoch = parse_int<EpochSeconds>(text)) return epoch;
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  auto y = parse_int<int>(text.substr(0, 4));
  auto mo = parse_int<unsigned>(text.substr(5, 2));
  auto d = parse_int<unsigned>(text.substr(8, 2));
  auto h = parse_int<int>(text.substr(11, 2));
  auto mi = parse_int<int>(text.substr(14, 2));
  auto s = parse_int<int>(text.substr(17, 2));
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  if (*h > 23 || *mi > 59 || *s > 59) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*mo},
                                        std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<EpochSeconds>(days) * 86400 + *h * 3600 + *mi * 60 + *s;
}

CandleSeries load_candles(std::istream& source, const ColumnSchema& schema,
                          EpochSeconds bar_duration, std::string symbol) {
  std::vector<Candle> candles;
  std::string line;
  std::size_t line_no = 0;
  std::optional<ResolvedColumns> columns;
  std::string header_line;
  std::vector<std::string_view> header;

  if (!schema.has_header) columns = resolve_columns(schema, nullptr);

  while (std::getline(source, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);  // UTF-8 BOM
    }
    if (trim(line).empty()) continue;
    if (!columns) {
      header_line = line;
      header = split_row(header_line);
      columns = resolve_columns(schema, &header);
      continue;
    }
    const auto cells = split_row(line);
    auto cell = [&](std::size_t pos) -> std::string_view {
      if (pos >= cells.size()) {
        throw DataError(fmt::format("row {}: malformed row, expected at least {} columns, got {}",
                                    line_no, pos + 1, cells.size()));
      }
      return cells[pos];
    };
    auto number = [&](std::size_t pos, const char* what) {
      auto v = parse_double(cell(pos));
      if (!v) {
        throw DataError(
            fmt::format("row {}: malformed row, cannot parse {} '{}'", line_no, what, cell(pos)));
      }
      return *v;
    };
    Candle c;
    auto t = parse_timestamp(cell(columns->ohlc[0]));
    if (!t) {
      throw DataError(fmt::format("row {}: malformed row, cannot parse time '{}'", line_no,
                                  cell(columns->ohlc[0])));
    }
    c.time = *t;
    c.open = number(columns->ohlc[1], "open");
    c.high = number(columns->ohlc[2], "high");
    c.low = number(columns->ohlc[3], "low");
    c.close = number(columns->ohlc[4], "close");
    if (columns->volume && *columns->volume < cells.size() && !cells[*columns->volume].empty()) {
      c.volume = number(*columns->volume, "volume");
    }
    if (!candles.empty() && c.time <= candles.back().time) {
      throw DataError(fmt::format("row {}: non-increasing timestamps ({} after {})", line_no,
                                  c.time, candles.back().time));
    }
    if (c.low > c.high || c.low > std::min(c.open, c.close) ||
        c.high < std::max(c.open, c.close)) {
      throw DataError(fmt::format("row {}: OHLC invariant violated", line_no));
    }
    candles.push_back(c);
  }
  if (candles.empty()) throw DataError("empty input: no candle rows");
  return CandleSeries(std::move(symbol), bar_duration, std::move(candles));
}

CandleSeries load_candles_file(const std::string& path, const ColumnSchema& schema,
                               EpochSeconds bar_duration, std::string symbol) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  try {
    return load_candles(in, schema, bar_duration, std::move(symbol));
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
}

namespace {

std::string shortest(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

void write_candles(std::ostream& sink, const CandleSeries& series) {
  const bool with_volume = std::any_of(series.candles().begin(), series.candles().end(),
                                       [](const Candle& c) { return c.volume.has_value(); });
  sink << (with_volume ? "time,open,high,low,close,volume\n" : "time,open,high,low,close\n");
  for (const Candle& c : series.candles()) {
    sink << c.time << ',' << shortest(c.open) << ',' << shortest(c.high) << ','
         << shortest(c.low) << ',' << shortest(c.close);
    if (with_volume) {
      sink << ',';
      if (c.volume) sink << shortest(*c.volume);
    }
    sink << '\n';
  }
  if (!sink) throw std::runtime_error("write_candles: output sink failure");
}

std::string data_hash(const CandleSeries& series) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const EpochSeconds bar = series.bar_duration();
  mix(&bar, sizeof bar);
  for (const Candle& c : series.candles()) {
    mix(&c.time, sizeof c.time);
    for (double v : {c.open, c.high, c.low, c.close, c.volume.value_or(-1.0)}) mix(&v, sizeof v);
  }
  return fmt::format("{:016x}", h);
}

std::pair<CandleSeries, CandleSeries> common_span(const CandleSeries& a, const CandleSeries& b) {
  const EpochSeconds first = std::max(a.first_time(), b.first_time());
  const EpochSeconds last = std::min(a.last_time(), b.last_time());
  if (first > last) {
    throw AnalysisError(fmt::format("no overlapping span between {} and {}", a.symbol(),
                                    b.symbol()));
  }
  try {
    return {a.between(first, last), b.between(first, last)};
  } catch (const DataError&) {
    throw AnalysisError(fmt::format("no overlapping span between {} and {}", a.symbol(),
                                    b.symbol()));
  }
}

}  // namespace leadlag
