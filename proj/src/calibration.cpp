#include "leadlag/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "leadlag/parallel.hpp"

namespace leadlag {

CalibrationCache::CalibrationCache(const CalibrationCache& other) {
  std::lock_guard lock(other.mutex_);
  entries_ = other.entries_;
}

CalibrationCache& CalibrationCache::operator=(const CalibrationCache& other) {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    entries_ = other.entries_;
  }
  return *this;
}

CalibrationCache CalibrationCache::load(const std::string& path) {
  CalibrationCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.rfind(" = ");
    double value = 0.0;
    if (eq == std::string::npos || !(std::istringstream(line.substr(eq + 3)) >> value)) {
      throw DataError(fmt::format("{}:{}: malformed cache line", path, line_no));
    }
    cache.entries_[line.substr(0, eq)] = value;
  }
  return cache;
}

void CalibrationCache::save(const std::string& path) const {
  std::lock_guard lock(mutex_);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write calibration cache '{}'", path));
  out << "# symbol|data-hash|mode|target-seconds = timescale\n";
  for (const auto& [key, value] : entries_) out << fmt::format("{} = {:.17g}\n", key, value);
}

std::string CalibrationCache::key(const std::string& symbol, const std::string& hash,
                                  TimeMode mode, double target_seconds) {
  return fmt::format("{}|{}|{}|{:.6f}", symbol, hash, to_string(mode), target_seconds);
}

std::optional<double> CalibrationCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CalibrationCache::store(const std::string& key, double timescale) {
  std::lock_guard lock(mutex_);
  entries_[key] = timescale;
}

std::size_t CalibrationCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

namespace {

struct Probe {
  double timescale = 0.0;
  double wavelength = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;

  bool defined() const { return std::isfinite(wavelength); }
};

class Search {
 public:
  Search(const MinMaxDetector& detector, double target, TimeMode mode, double tolerance)
      : detector_(detector), target_(target), mode_(mode), tolerance_(tolerance) {}

  Probe probe(double timescale) const {
    Probe p;
    p.timescale = timescale;
    const std::vector<Extremum> found = detector_.scan(timescale);
    p.count = found.size();
    if (found.size() >= 2) {
      const EpochSeconds span =
          detector_.series().elapsed(found.front().candle_index, found.back().candle_index, mode_);
      p.wavelength = 2.0 * static_cast<double>(span) / static_cast<double>(found.size() - 1);
    }
    return p;
  }

  bool feasible(const Probe& p) const {
    return p.defined() && relative_error(p) <= tolerance_;
  }
  double relative_error(const Probe& p) const { return std::abs(p.wavelength - target_) / target_; }
  double signed_gap(const Probe& p) const { return p.wavelength - target_; }

  CalibrationResult result(const Probe& p) const {
    return CalibrationResult{p.timescale, p.wavelength, target_, relative_error(p), p.count};
  }

  // Bisection on a bracket whose end points straddle the target. Falls back
  // to a dense scan as soon as the map leaves the envelope of the bracket.
  std::optional<Probe> refine(Probe lo, Probe hi, int max_bisections, int refine_points) const {
    const Probe lo0 = lo;
    const Probe hi0 = hi;
    for (int it = 0; it < max_bisections; ++it) {
      const double mid_ts = std::sqrt(lo.timescale * hi.timescale);
      if (!(mid_ts > lo.timescale && mid_ts < hi.timescale)) break;
      const Probe mid = probe(mid_ts);
      const double env_lo = std::min(lo.wavelength, hi.wavelength);
      const double env_hi = std::max(lo.wavelength, hi.wavelength);
      if (!mid.defined() || mid.wavelength < env_lo || mid.wavelength > env_hi) {
        break;
      }
      if (feasible(mid)) return mid;
      if (std::signbit(signed_gap(lo)) != std::signbit(signed_gap(mid))) {
        hi = mid;
      } else {
        lo = mid;
      }
      if (hi.timescale / lo.timescale - 1.0 < 1e-9) break;
    }
    // Either a step jumps across the target or the map is non-monotone here.
    const double ratio = std::pow(hi0.timescale / lo0.timescale, 1.0 / (refine_points + 1));
    double ts = lo0.timescale;
    for (int k = 0; k < refine_points; ++k) {
      ts *= ratio;
      const Probe p = probe(ts);
      if (feasible(p)) return p;
    }
    return std::nullopt;
  }

 private:
  const MinMaxDetector& detector_;
  double target_;
  TimeMode mode_;
  double tolerance_;
};

}  // namespace

CalibrationResult calibrate_timescale(const MinMaxDetector& detector, double target_seconds,
                                      TimeMode mode, const CalibrationOptions& options) {
  const CandleSeries& series = detector.series();
  const std::string& market = series.symbol();
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(options.min_timescale > 0.0) || !(options.max_timescale > options.min_timescale) ||
      options.grid_points < 2) {
    throw std::invalid_argument("invalid timescale search range");
  }
  const double bar = static_cast<double>(series.bar_duration());
  if (!(target_seconds > 2.0 * bar)) {
    throw CalibrationError(
        market, fmt::format("target unreachable: {} s is not above two bars ({} s), below MACD "
                            "resolution",
                            target_seconds, 2.0 * bar));
  }
  // Room for at least 10 extrema at the target resolution.
  const double span = static_cast<double>(series.elapsed(0, series.size() - 1, mode));
  if (span < 4.5 * target_seconds) {
    throw CalibrationError(market,
                           fmt::format("series too short: span {} s hosts fewer than 10 extrema "
                                       "at wavelength {} s",
                                       span, target_seconds));
  }

  const Search search(detector, target_seconds, mode, options.tolerance);

  std::string cache_key;
  if (options.cache != nullptr) {
    cache_key = CalibrationCache::key(market, detector.content_hash(), mode, target_seconds);
    if (auto cached = options.cache->lookup(cache_key)) {
      const Probe p = search.probe(*cached);
      if (search.feasible(p)) return search.result(p);
    }
  }
  auto remember = [&](const Probe& p) {
    if (options.cache != nullptr) options.cache->store(cache_key, p.timescale);
    return search.result(p);
  };

  if (options.hint) {
    const Probe p = search.probe(*options.hint);
    if (search.feasible(p)) return remember(p);
  }

  const double lo = std::max(options.min_timescale, MinMaxDetector::min_timescale());
  const double hi = options.max_timescale;
  const auto n = static_cast<std::size_t>(options.grid_points);
  auto grid_ts = [&](std::size_t k) {
    return lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
  };
  // Probed lazily in order when sequential; all at once when parallel.
  std::vector<std::optional<Probe>> grid(n);
  if (options.jobs > 1) {
    parallel_for(n, options.jobs, [&](std::size_t k) { grid[k] = search.probe(grid_ts(k)); });
  }
  auto at = [&](std::size_t k) -> const Probe& {
    if (!grid[k]) grid[k] = search.probe(grid_ts(k));
    return *grid[k];
  };

  bool any_defined = false;
  bool any_bracket = false;
  double seen_min = std::numeric_limits<double>::infinity();
  double seen_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Probe p = at(k);
    if (p.defined()) {
      any_defined = true;
      seen_min = std::min(seen_min, p.wavelength);
      seen_max = std::max(seen_max, p.wavelength);
    }
    if (search.feasible(p)) return remember(p);
    if (k + 1 == n || !p.defined()) continue;
    const Probe next = at(k + 1);
    if (next.defined() &&
        std::signbit(search.signed_gap(p)) != std::signbit(search.signed_gap(next))) {
      any_bracket = true;
      if (search.feasible(next)) continue;  // returned on the next iteration
      if (auto found = search.refine(p, next, options.max_bisections, options.refine_points)) {
        return remember(*found);
      }
    }
  }

  if (!any_defined) {
    throw CalibrationError(market, "fewer than 2 extrema at every timescale");
  }
  if (!any_bracket) {
    throw CalibrationError(
        market, fmt::format("target {:.1f} s not bracketed: wavelengths span [{:.1f}, {:.1f}] s "
                            "over timescales [{:.3f}, {:.3f}]",
                            target_seconds, seen_min, seen_max, lo, hi));
  }
  throw CalibrationError(
      market, fmt::format("target {:.1f} s unreachable within {:.1f}% tolerance (the wavelength "
                          "map jumps across it)",
                          target_seconds, 100.0 * options.tolerance));
}

CalibrationResult calibrate_timescale(const CandleSeries& series, double target_seconds,
                                      TimeMode mode, const CalibrationOptions& options) {
  return calibrate_timescale(MinMaxDetector(series), target_seconds, mode, options);
}

SynchronizedPair synchronize_pair(const MinMaxDetector& primary, const MinMaxDetector& secondary,
                                  int target_candles, const SyncOptions& options) {
  if (target_candles < options.min_target_candles || target_candles > options.max_target_candles) {
    throw std::invalid_argument(fmt::format("target wavelength {} candles outside [{}, {}]",
                                            target_candles, options.min_target_candles,
                                            options.max_target_candles));
  }
  if (primary.series().bar_duration() != secondary.series().bar_duration()) {
    throw DataError("primary and secondary use different bar sizes");
  }
  const double target_seconds =
      static_cast<double>(target_candles) * static_cast<double>(primary.series().bar_duration());
  const CalibrationResult p =
      calibrate_timescale(primary, target_seconds, TimeMode::Candles, options.calibration);
  ExtremumSeries p_extrema = primary.detect(p.timescale);
  const double lambda_star = mean_wavelength(p_extrema, primary.series(), TimeMode::Seconds);

  CalibrationOptions sec_options = options.calibration;
  if (options.hint_secondary) sec_options.hint = p.timescale;
  const CalibrationResult s =
      calibrate_timescale(secondary, lambda_star, TimeMode::Seconds, sec_options);
  ExtremumSeries s_extrema = secondary.detect(s.timescale);
  return SynchronizedPair{p, s, lambda_star, std::move(p_extrema), std::move(s_extrema)};
}

SynchronizedPair synchronize_pair(const CandleSeries& primary, const CandleSeries& secondary,
                                  int target_candles, const SyncOptions& options) {
  auto [a, b] = common_span(primary, secondary);
  const MinMaxDetector da(std::move(a));
  const MinMaxDetector db(std::move(b));
  return synchronize_pair(da, db, target_candles, options);
}

}  // namespace leadlag
