#include "leadlag/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "leadlag/error.hpp"
#include "leadlag/minmax.hpp"
#include "leadlag/parallel.hpp"

namespace leadlag {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void SweepConfig::validate() const {
  if (min_wavelength < 3) {
    throw std::invalid_argument(
        fmt::format("min_wavelength must be at least 3 candles (got {})", min_wavelength));
  }
  if (max_wavelength < min_wavelength) {
    throw std::invalid_argument(fmt::format("wavelength range {}..{} is empty", min_wavelength,
                                            max_wavelength));
  }
  if (wavelength_step < 1) throw std::invalid_argument("wavelength_step must be >= 1");
  if (bar_duration <= 0) throw std::invalid_argument("bar_duration must be positive");
  if (time_modes.empty()) throw std::invalid_argument("time_modes must not be empty");
  if (histogram_bins < 4 || histogram_bins % 2 != 0) {
    throw std::invalid_argument(
        fmt::format("histogram_bins must be even and >= 4 (got {})", histogram_bins));
  }
  if (!std::isfinite(hat_center)) throw std::invalid_argument("hat_center must be finite");
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw std::invalid_argument("tolerance must lie in (0, 1)");
  }
  if (!(delta_coeff >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  if (!(max_failed_fraction >= 0.0 && max_failed_fraction <= 1.0)) {
    throw std::invalid_argument("max_failed_fraction must lie in [0, 1]");
  }
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
}

std::vector<int> SweepConfig::wavelengths() const {
  std::vector<int> out;
  for (int w = min_wavelength; w <= max_wavelength; w += wavelength_step) out.push_back(w);
  return out;
}

std::size_t histogram_bin(double angle, int bins) {
  const double width = 2.0 * kPi / bins;
  const auto k = static_cast<std::size_t>(std::floor((wrap_angle(angle) + kPi) / width));
  return std::min(k, static_cast<std::size_t>(bins) - 1);
}

AggregatedHistogram aggregate_histograms(std::span<const AngularDistribution> distributions,
                                         int bins) {
  if (distributions.empty()) throw std::invalid_argument("aggregate_histograms: no distributions");
  if (bins < 1) throw std::invalid_argument("aggregate_histograms: bins must be >= 1");
  const auto nb = static_cast<std::size_t>(bins);

  AggregatedHistogram h;
  h.groups = distributions.size();
  h.bin_edges.resize(nb + 1);
  for (std::size_t k = 0; k <= nb; ++k) {
    h.bin_edges[k] = -kPi + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(nb);
  }
  h.bin_edges.back() = kPi;
  h.mean_freq.assign(nb, 0.0);
  h.min_freq.assign(nb, 1.0);
  h.max_freq.assign(nb, 0.0);
  h.std_freq.assign(nb, 0.0);
  h.pooled_freq.assign(nb, 0.0);

  std::vector<double> sum_sq(nb, 0.0);
  std::vector<std::size_t> pooled(nb, 0);
  std::size_t pooled_total = 0;
  for (const AngularDistribution& d : distributions) {
    if (d.samples.empty()) throw std::invalid_argument("aggregate_histograms: empty distribution");
    std::vector<std::size_t> counts(nb, 0);
    for (const PhaseSample& s : d.samples) ++counts[histogram_bin(s.alpha, bins)];
    const auto n = static_cast<double>(d.samples.size());
    for (std::size_t k = 0; k < nb; ++k) {
      const double f = static_cast<double>(counts[k]) / n;
      h.mean_freq[k] += f;
      sum_sq[k] += f * f;
      h.min_freq[k] = std::min(h.min_freq[k], f);
      h.max_freq[k] = std::max(h.max_freq[k], f);
      pooled[k] += counts[k];
    }
    pooled_total += d.samples.size();
  }
  const auto g = static_cast<double>(distributions.size());
  for (std::size_t k = 0; k < nb; ++k) {
    h.mean_freq[k] /= g;
    const double var = sum_sq[k] / g - h.mean_freq[k] * h.mean_freq[k];
    h.std_freq[k] = var > 0.0 ? std::sqrt(var) : 0.0;
    h.pooled_freq[k] = static_cast<double>(pooled[k]) / static_cast<double>(pooled_total);
  }
  if (distributions.size() == 1) h.std_freq.assign(nb, 0.0);
  return h;
}

std::vector<double> DirectionReport::pooled_angles() const {
  std::vector<double> out;
  for (const AngularDistribution& d : distributions) {
    for (const PhaseSample& s : d.samples) out.push_back(s.alpha);
  }
  return out;
}

LeadClass classify_direction(const CircularSummary& summary) {
  const std::optional<double> direction =
      summary.weighted_mean ? summary.weighted_mean : summary.mean_direction;
  if (direction && std::abs(*direction) > kPi / 2.0) return LeadClass::NotPositivelyCorrelated;
  if (!summary.weighted_mean || !summary.weighted_ci) return LeadClass::Undecided;
  return classify_lead(*summary.weighted_mean, *summary.weighted_ci);
}

namespace {

// Outcome of one (ordering, wavelength) work item.
struct WorkResult {
  std::optional<SynchronizedPair> pair;
  std::string calibration_failure;
};

struct Ordering {
  const MinMaxDetector* primary;
  const MinMaxDetector* secondary;
};

DirectionReport reduce_direction(const Ordering& ordering, TimeSelector mode,
                                 const std::vector<int>& wavelengths,
                                 std::span<const WorkResult> results, const SweepConfig& config) {
  DirectionReport r;
  r.primary_symbol = ordering.primary->series().symbol();
  r.secondary_symbol = ordering.secondary->series().symbol();
  r.mode = mode;

  for (std::size_t k = 0; k < wavelengths.size(); ++k) {
    const WorkResult& w = results[k];
    if (!w.pair) {
      r.failures.push_back({wavelengths[k], w.calibration_failure});
      continue;
    }
    AngularDistribution dist;
    try {
      dist = compute_phase_shifts(w.pair->primary_extrema, w.pair->secondary_extrema, mode);
    } catch (const AnalysisError& e) {
      r.failures.push_back({wavelengths[k], e.what()});
      continue;
    }
    dist.wavelength_candles = wavelengths[k];
    dist.lambda_star_seconds = w.pair->lambda_star_seconds;

    WavelengthGroup g;
    g.wavelength_candles = wavelengths[k];
    g.primary_calibration = w.pair->primary;
    g.secondary_calibration = w.pair->secondary;
    g.lambda_star_seconds = w.pair->lambda_star_seconds;
    g.primary_extrema = w.pair->primary_extrema.size();
    g.secondary_extrema = w.pair->secondary_extrema.size();
    g.samples = dist.samples.size();
    r.groups.push_back(g);
    r.distributions.push_back(std::move(dist));
  }

  const double total = static_cast<double>(wavelengths.size());
  const double failed = static_cast<double>(r.failures.size());
  if (r.groups.empty() || failed > config.max_failed_fraction * total) {
    std::string detail;
    for (std::size_t i = 0; i < r.failures.size() && i < 3; ++i) {
      detail += fmt::format("; w={}: {}", r.failures[i].wavelength_candles, r.failures[i].reason);
    }
    throw AnalysisError(fmt::format(
        "{} -> {} ({}): {} of {} wavelength groups failed, more than the allowed {:.0f}%{}",
        r.primary_symbol, r.secondary_symbol, to_string(mode), r.failures.size(),
        wavelengths.size(), 100.0 * config.max_failed_fraction, detail));
  }

  const std::vector<double> pooled = r.pooled_angles();
  const double center =
      config.hat_at_mode ? histogram_mode(pooled, config.histogram_bins) : config.hat_center;
  r.summary = summarize(pooled, center, config.confidence_level);
  for (std::size_t k = 0; k < r.groups.size(); ++k) {
    WavelengthGroup& g = r.groups[k];
    const std::vector<double> angles = r.distributions[k].angles();
    const std::vector<double> weights = hat_weights(angles, center);
    double wsum = 0.0;
    for (double x : weights) wsum += x;
    if (!(wsum > 0.0)) continue;
    const Resultant res = mean_resultant(angles, weights);
    if (res.length < kZeroResultant) continue;
    g.weighted_mean = wrap_angle(std::atan2(res.x, res.y));
    const double lambda_minutes = g.primary_calibration.achieved_wavelength / 60.0;
    g.lead_minutes = *g.weighted_mean / (2.0 * kPi) * lambda_minutes;
  }
  if (r.summary.mean_direction && r.summary.ci_halfwidth) {
    r.h_m = one_sample_mean_test(*r.summary.mean_direction, *r.summary.ci_halfwidth, 0.0);
  }

  std::vector<std::vector<double>> ww_groups;
  for (const AngularDistribution& d : r.distributions) {
    if (d.samples.size() >= 2) ww_groups.push_back(d.angles());
  }
  r.ww_groups = ww_groups.size();
  if (ww_groups.size() >= 2) r.p_ww = watson_williams(ww_groups);

  // Sample-size weighting across wavelengths.
  double n_sum = 0.0;
  double lambda_sum = 0.0;
  double lead_sum = 0.0;
  double lead_n = 0.0;
  for (const WavelengthGroup& g : r.groups) {
    const auto n = static_cast<double>(g.samples);
    n_sum += n;
    lambda_sum += n * g.primary_calibration.achieved_wavelength / 60.0;
    if (g.lead_minutes) {
      lead_sum += n * *g.lead_minutes;
      lead_n += n;
    }
  }
  r.mean_wavelength_minutes = n_sum > 0.0 ? lambda_sum / n_sum : 0.0;
  if (lead_n > 0.0) r.lead_minutes = lead_sum / lead_n;
  const auto to_minutes = [&](const std::optional<double>& angle) -> std::optional<double> {
    if (!angle) return std::nullopt;
    return *angle / (2.0 * kPi) * r.mean_wavelength_minutes;
  };
  r.lead_ci_minutes = to_minutes(r.summary.weighted_ci);
  r.lead_pooled_minutes = to_minutes(r.summary.weighted_mean);
  r.lead_unweighted_minutes = to_minutes(r.summary.mean_direction);

  r.classification = classify_direction(r.summary);
  r.histogram = aggregate_histograms(r.distributions, config.histogram_bins);
  return r;
}

}  // namespace

PairReport run_pair_analysis(const CandleSeries& primary, const CandleSeries& secondary,
                             const SweepConfig& config) {
  config.validate();
  if (primary.bar_duration() != config.bar_duration ||
      secondary.bar_duration() != config.bar_duration) {
    throw DataError(fmt::format("bar duration mismatch: primary {}s, secondary {}s, config {}s",
                                primary.bar_duration(), secondary.bar_duration(),
                                config.bar_duration));
  }
  auto [a, b] = common_span(primary, secondary);
  const MinMaxDetector det_a(std::move(a), config.delta_coeff);
  const MinMaxDetector det_b(std::move(b), config.delta_coeff);

  const std::vector<int> wavelengths = config.wavelengths();
  const Ordering orderings[2] = {{&det_a, &det_b}, {&det_b, &det_a}};

  SyncOptions sync;
  sync.calibration.tolerance = config.tolerance;
  sync.calibration.jobs = 1;  // the sweep itself is the parallel unit
  sync.calibration.cache = config.cache;
  sync.min_target_candles = config.min_wavelength;
  sync.max_target_candles = config.max_wavelength;

  const std::size_t nw = wavelengths.size();
  std::vector<WorkResult> results(2 * nw);
  parallel_for(results.size(), config.jobs, [&](std::size_t item) {
    const Ordering& o = orderings[item / nw];
    WorkResult& out = results[item];
    try {
      out.pair = synchronize_pair(*o.primary, *o.secondary, wavelengths[item % nw], sync);
    } catch (const AnalysisError& e) {
      out.calibration_failure = e.what();
    }
  });

  PairReport report;
  report.primary_symbol = det_a.series().symbol();
  report.secondary_symbol = det_b.series().symbol();
  report.primary_hash = det_a.content_hash();
  report.secondary_hash = det_b.content_hash();
  report.config = config;
  report.config.cache = nullptr;
  for (std::size_t o = 0; o < 2; ++o) {
    const std::span<const WorkResult> slice(results.data() + o * nw, nw);
    for (TimeSelector mode : config.time_modes) {
      report.directions.push_back(reduce_direction(orderings[o], mode, wavelengths, slice, config));
    }
  }
  return report;
}

}  // namespace leadlag
