#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadlag/calibration.hpp"
#include "leadlag/circular_stats.hpp"
#include "leadlag/market_data.hpp"
#include "leadlag/phase_shift.hpp"

namespace leadlag {

struct SweepConfig {
  int min_wavelength = 30;  // candles, inclusive
  int max_wavelength = 180;
  int wavelength_step = 1;
  EpochSeconds bar_duration = 3600;
  std::vector<TimeSelector> time_modes{TimeSelector::ExtremumTime, TimeSelector::ConfirmTime};
  int histogram_bins = 24;
  double hat_center = 0.0;  // radians
  /// Center the hat on the fullest pooled histogram bin instead of hat_center.
  bool hat_at_mode = false;
  double tolerance = 0.02;
  double delta_coeff = 0.3;
  /// The analysis fails when more than this share of wavelength groups fails.
  double max_failed_fraction = 0.2;
  double confidence_level = 0.95;
  /// Worker threads for the sweep; results do not depend on it.
  unsigned jobs = 1;
  CalibrationCache* cache = nullptr;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  std::vector<int> wavelengths() const;
};

struct AggregatedHistogram {
  std::vector<double> bin_edges;  // bins + 1 edges from -pi to pi
  std::vector<double> mean_freq;
  std::vector<double> min_freq;
  std::vector<double> max_freq;
  std::vector<double> std_freq;  // population standard deviation across groups
  std::vector<double> pooled_freq;
  std::size_t groups = 0;

  std::size_t bins() const noexcept { return pooled_freq.size(); }
};

/// Bin index of an angle on `bins` equal-width bins over [-pi, pi).
std::size_t histogram_bin(double angle, int bins);

/// Throws std::invalid_argument for an empty list, an empty distribution or
/// fewer than one bin.
AggregatedHistogram aggregate_histograms(std::span<const AngularDistribution> distributions,
                                         int bins);

/// Results of one successfully processed wavelength.
struct WavelengthGroup {
  int wavelength_candles = 0;
  CalibrationResult primary_calibration;
  CalibrationResult secondary_calibration;
  double lambda_star_seconds = 0.0;
  std::size_t primary_extrema = 0;
  std::size_t secondary_extrema = 0;
  std::size_t samples = 0;
  std::optional<double> weighted_mean;  // hat-weighted mean direction of this group
  std::optional<double> lead_minutes;   // from weighted_mean and the primary wavelength
};

struct GroupFailure {
  int wavelength_candles = 0;
  std::string reason;
};

struct DirectionReport {
  std::string primary_symbol;
  std::string secondary_symbol;
  TimeSelector mode = TimeSelector::ExtremumTime;

  CircularSummary summary;  // pooled over all groups; summary.hat_center is the center used
  std::optional<int> h_m;
  std::optional<double> p_ww;
  std::size_t ww_groups = 0;

  /// Sample-weighted mean of the per-wavelength hat-weighted leads.
  std::optional<double> lead_minutes;
  /// Pooled weighted CI halfwidth converted with the mean wavelength.
  std::optional<double> lead_ci_minutes;
  /// Pooled weighted mean direction converted with the mean wavelength.
  std::optional<double> lead_pooled_minutes;
  /// Unweighted pooled mean direction converted with the mean wavelength.
  std::optional<double> lead_unweighted_minutes;
  double mean_wavelength_minutes = 0.0;  // sample-weighted, candle clock

  LeadClass classification = LeadClass::Undecided;
  AggregatedHistogram histogram;
  std::vector<WavelengthGroup> groups;
  std::vector<GroupFailure> failures;
  std::vector<AngularDistribution> distributions;  // same order as groups

  std::vector<double> pooled_angles() const;
};

struct PairReport {
  std::string primary_symbol;
  std::string secondary_symbol;
  std::string primary_hash;
  std::string secondary_hash;
  SweepConfig config;
  /// Primary-as-given first, then the swapped ordering; modes in config order.
  std::vector<DirectionReport> directions;
};

/// Classification with fallbacks for undefined weighted statistics: without a
/// weighted mean the unweighted one decides the correlation check, without a
/// weighted CI the result is Undecided.
LeadClass classify_direction(const CircularSummary& summary);

/// Full sweep over both orderings and all requested time modes. Failed
/// wavelengths are recorded and skipped; throws AnalysisError when the
/// failure share exceeds `config.max_failed_fraction` or nothing succeeds.
PairReport run_pair_analysis(const CandleSeries& primary, const CandleSeries& secondary,
                             const SweepConfig& config);

}  // namespace leadlag
