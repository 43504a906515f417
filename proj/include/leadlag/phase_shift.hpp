#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "leadlag/minmax.hpp"

namespace leadlag {

/// Which timestamp of an extremum enters the phase computation. ConfirmTime
/// applies to both markets.
enum class TimeSelector { ExtremumTime, ConfirmTime };

std::string_view to_string(TimeSelector selector);
TimeSelector time_selector_from_string(std::string_view text);

struct PhaseSample {
  double alpha = 0.0;               // radians in [-pi, pi)
  std::size_t secondary_index = 0;  // j
  std::size_t primary_interval = 0; // i, bracketing interval is (i, i+1)
  TimeSelector time_mode_used = TimeSelector::ExtremumTime;
  EpochSeconds secondary_time = 0;
};

struct AngularDistribution {
  std::vector<PhaseSample> samples;
  int wavelength_candles = 0;
  double lambda_star_seconds = 0.0;
  std::string primary_symbol;
  std::string secondary_symbol;

  std::vector<double> angles() const;
};

/// Relative position of every secondary extremum inside the primary's
/// bracketing interval t_i <= t~_j < t_{i+1}, measured from the same-kind
/// neighbour and scaled so a full interval spans pi. Secondary extrema before
/// t_1 or at/after t_N are skipped.
///
/// Negative angles mean the secondary market runs ahead.
/// Throws AnalysisError when no secondary extremum falls inside the span.
AngularDistribution compute_phase_shifts(const ExtremumSeries& primary,
                                         const ExtremumSeries& secondary,
                                         TimeSelector selector);

/// `wavelength,alpha,secondary_time,mode`
void write_samples_csv(std::ostream& sink, const std::vector<AngularDistribution>& distributions,
                       bool with_header = true);

}  // namespace leadlag
