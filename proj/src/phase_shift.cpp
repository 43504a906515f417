#include "leadlag/phase_shift.hpp"

#include <algorithm>
#include <cassert>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "leadlag/circular_stats.hpp"
#include "leadlag/error.hpp"

namespace leadlag {

std::string_view to_string(TimeSelector selector) {
  return selector == TimeSelector::ExtremumTime ? "extrema" : "confirmed";
}

TimeSelector time_selector_from_string(std::string_view text) {
  if (text == "extrema" || text == "extremum") return TimeSelector::ExtremumTime;
  if (text == "confirmed" || text == "confirm") return TimeSelector::ConfirmTime;
  throw std::invalid_argument(fmt::format("unknown time mode '{}'", text));
}

std::vector<double> AngularDistribution::angles() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const PhaseSample& s : samples) out.push_back(s.alpha);
  return out;
}

namespace {

std::vector<EpochSeconds> select_times(const ExtremumSeries& series, TimeSelector selector) {
  std::vector<EpochSeconds> out;
  out.reserve(series.size());
  for (const Extremum& e : series.extrema()) {
    out.push_back(selector == TimeSelector::ExtremumTime ? e.time : e.confirm_time);
    if (out.size() > 1 && out.back() <= out[out.size() - 2]) {
      throw AnalysisError(fmt::format("{}: {} times are not strictly increasing",
                                      series.source_symbol(), to_string(selector)));
    }
  }
  return out;
}

}  // namespace

AngularDistribution compute_phase_shifts(const ExtremumSeries& primary,
                                         const ExtremumSeries& secondary,
                                         TimeSelector selector) {
  if (primary.size() < 2 || secondary.size() < 2) {
    throw AnalysisError("phase shifts need at least 2 extrema in each market");
  }
  const std::vector<EpochSeconds> t = select_times(primary, selector);
  const std::vector<EpochSeconds> tt = select_times(secondary, selector);

  AngularDistribution dist;
  dist.primary_symbol = primary.source_symbol();
  dist.secondary_symbol = secondary.source_symbol();

  // j1: first secondary time >= t_1; j2: last secondary time < t_N.
  const auto j_begin = static_cast<std::size_t>(std::lower_bound(tt.begin(), tt.end(), t.front()) -
                                                tt.begin());
  const auto j_end = static_cast<std::size_t>(std::lower_bound(tt.begin(), tt.end(), t.back()) -
                                              tt.begin());
  if (j_begin >= j_end) {
    throw AnalysisError(fmt::format("no {} extremum inside the {} extrema span",
                                    secondary.source_symbol(), primary.source_symbol()));
  }
  dist.samples.reserve(j_end - j_begin);
  for (std::size_t j = j_begin; j < j_end; ++j) {
    // Largest i with t_i <= t~_j; then t~_j < t_{i+1} because t~_j < t_N.
    const auto i = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), tt[j]) -
                                            t.begin()) -
                   1;
    assert(i + 1 < t.size());
    const EpochSeconds width = t[i + 1] - t[i];
    assert(width > 0);
    // Alternation: exactly one of X_i, X_{i+1} shares the kind of X~_j.
    const EpochSeconds anchor = primary[i].kind == secondary[j].kind ? t[i] : t[i + 1];
    const double alpha = static_cast<double>(tt[j] - anchor) / static_cast<double>(width) *
                         std::numbers::pi;
    dist.samples.push_back(PhaseSample{wrap_angle(alpha), j, i, selector, tt[j]});
  }
  return dist;
}

void write_samples_csv(std::ostream& sink, const std::vector<AngularDistribution>& distributions,
                       bool with_header) {
  if (with_header) sink << "wavelength,alpha,secondary_time,mode\n";
  for (const AngularDistribution& d : distributions) {
    for (const PhaseSample& s : d.samples) {
      sink << fmt::format("{},{:.17g},{},{}\n", d.wavelength_candles, s.alpha, s.secondary_time,
                          to_string(s.time_mode_used));
    }
  }
  if (!sink) throw std::runtime_error("write_samples_csv: output sink failure");
}

}  // namespace leadlag
