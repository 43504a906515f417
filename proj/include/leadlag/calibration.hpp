#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "leadlag/error.hpp"
#include "leadlag/market_data.hpp"
#include "leadlag/minmax.hpp"

namespace leadlag {

struct CalibrationResult {
  double timescale = 0.0;
  double achieved_wavelength = 0.0;  // seconds, measured in the requested mode
  double target_wavelength = 0.0;    // seconds
  double relative_error = 0.0;
  std::size_t extrema_count = 0;
};

/// Calibration failure, labeled with the market it occurred on.
class CalibrationError : public AnalysisError {
 public:
  CalibrationError(std::string market, const std::string& what)
      : AnalysisError(market + ": " + what), market_(std::move(market)) {}
  const std::string& market() const noexcept { return market_; }

 private:
  std::string market_;
};

/// Persistent (symbol, data hash, mode, target) -> timescale map stored as
/// plain `key = value` lines. Safe for concurrent lookup/store.
class CalibrationCache {
 public:
  CalibrationCache() = default;
  CalibrationCache(const CalibrationCache& other);
  CalibrationCache& operator=(const CalibrationCache& other);

  /// A missing file yields an empty cache; malformed lines throw DataError.
  static CalibrationCache load(const std::string& path);
  void save(const std::string& path) const;

  static std::string key(const std::string& symbol, const std::string& hash, TimeMode mode,
                         double target_seconds);
  std::optional<double> lookup(const std::string& key) const;
  void store(const std::string& key, double timescale);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, double> entries_;
};

struct CalibrationOptions {
  double tolerance = 0.02;
  double min_timescale = 0.1;
  double max_timescale = 100.0;
  int grid_points = 64;
  int max_bisections = 48;
  int refine_points = 32;
  /// Tried before the search; accepted if it meets the tolerance.
  std::optional<double> hint;
  /// Threads used for the coarse grid.
  unsigned jobs = 1;
  CalibrationCache* cache = nullptr;
};

/// Finds a timescale whose MinMax mean wavelength (measured in `mode`) is
/// within `options.tolerance` of `target_seconds`.
///
/// A geometric grid over [min_timescale, max_timescale] is scanned in
/// increasing order; the first grid point within tolerance or the first
/// bracket containing one (found by bisection, with a dense scan when the
/// map turns out non-monotone inside the bracket) wins.
CalibrationResult calibrate_timescale(const MinMaxDetector& detector, double target_seconds,
                                      TimeMode mode, const CalibrationOptions& options = {});
CalibrationResult calibrate_timescale(const CandleSeries& series, double target_seconds,
                                      TimeMode mode, const CalibrationOptions& options = {});

struct SyncOptions {
  CalibrationOptions calibration;
  int min_target_candles = 30;
  int max_target_candles = 180;
  /// Start the secondary search from the primary's timescale.
  bool hint_secondary = true;
};

struct SynchronizedPair {
  CalibrationResult primary;
  CalibrationResult secondary;
  double lambda_star_seconds = 0.0;
  ExtremumSeries primary_extrema;
  ExtremumSeries secondary_extrema;
};

/// Calibrates the primary to `target_candles` on the candle clock, converts
/// its wavelength to wall-clock seconds (lambda*), and calibrates the
/// secondary to lambda* on the wall clock. The detectors must already hold
/// the common time span of both markets.
SynchronizedPair synchronize_pair(const MinMaxDetector& primary, const MinMaxDetector& secondary,
                                  int target_candles, const SyncOptions& options = {});

/// Truncates both series to their common span first.
SynchronizedPair synchronize_pair(const CandleSeries& primary, const CandleSeries& secondary,
                                  int target_candles, const SyncOptions& options = {});

}  // namespace leadlag
