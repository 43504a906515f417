#include "leadlag/circular_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "leadlag/error.hpp"
#include "leadlag/special_functions.hpp"

namespace leadlag {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_nonempty(std::span<const double> angles, const char* what) {
  if (angles.empty()) throw std::invalid_argument(fmt::format("{}: empty input", what));
}

}  // namespace

double wrap_angle(double angle) {
  if (angle >= -kPi && angle < kPi) return angle;
  double r = angle - kTwoPi * std::floor((angle + kPi) / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  return r;
}

Resultant mean_resultant(std::span<const double> angles, std::span<const double> weights) {
  require_nonempty(angles, "mean_resultant");
  double sx = 0.0;
  double sy = 0.0;
  double total = 0.0;
  if (weights.empty()) {
    for (double a : angles) {
      sx += std::sin(a);
      sy += std::cos(a);
    }
    total = static_cast<double>(angles.size());
  } else {
    if (weights.size() != angles.size()) {
      throw std::invalid_argument("mean_resultant: weights and angles differ in length");
    }
    for (std::size_t i = 0; i < angles.size(); ++i) {
      if (weights[i] < 0.0) throw std::invalid_argument("mean_resultant: negative weight");
      sx += weights[i] * std::sin(angles[i]);
      sy += weights[i] * std::cos(angles[i]);
      total += weights[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("mean_resultant: all-zero weights");
  }
  Resultant r;
  r.x = sx / total;
  r.y = sy / total;
  r.length = std::min(1.0, std::hypot(r.x, r.y));
  return r;
}

double mean_direction(std::span<const double> angles, std::span<const double> weights) {
  const Resultant r = mean_resultant(angles, weights);
  if (r.length < kZeroResultant) {
    throw AnalysisError("zero resultant: no unique mean direction");
  }
  return wrap_angle(std::atan2(r.x, r.y));
}

double circular_variance(std::span<const double> angles, std::span<const double> weights) {
  return 1.0 - mean_resultant(angles, weights).length;
}

double circular_skewness(std::span<const double> angles, double mean) {
  require_nonempty(angles, "circular_skewness");
  double s = 0.0;
  for (double a : angles) s += std::sin(2.0 * (a - mean));
  return s / static_cast<double>(angles.size());
}

double circular_kurtosis(std::span<const double> angles, double mean) {
  require_nonempty(angles, "circular_kurtosis");
  double s = 0.0;
  for (double a : angles) s += std::cos(2.0 * (a - mean));
  return s / static_cast<double>(angles.size());
}

std::vector<double> hat_weights(std::span<const double> angles, double center) {
  std::vector<double> w;
  w.reserve(angles.size());
  for (double a : angles) {
    w.push_back(std::clamp(1.0 - std::abs(wrap_angle(a - center)) / kPi, 0.0, 1.0));
  }
  return w;
}

double histogram_mode(std::span<const double> angles, int bins) {
  require_nonempty(angles, "histogram_mode");
  if (bins < 1) throw std::invalid_argument("histogram_mode: bins must be >= 1");
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  const double width = kTwoPi / bins;
  for (double a : angles) {
    auto k = static_cast<std::size_t>(std::floor((wrap_angle(a) + kPi) / width));
    ++counts[std::min(k, counts.size() - 1)];
  }
  const auto best = static_cast<double>(std::max_element(counts.begin(), counts.end()) -
                                        counts.begin());
  return -kPi + (best + 0.5) * width;
}

std::optional<double> confidence_halfwidth(double rbar, double n, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument(fmt::format("confidence level {} outside (0, 1)", level));
  }
  if (!(n > 0.0) || !(rbar >= kZeroResultant)) return std::nullopt;
  const double chi2 = special::chi_square_quantile(level, 1.0);
  const double r = n * rbar;
  double t = 0.0;
  if (rbar <= 0.9) {
    if (!(2.0 * r * r > n * chi2)) return std::nullopt;
    t = std::sqrt(2.0 * n * (2.0 * r * r - n * chi2) / (4.0 * n - chi2));
  } else {
    const double inner = n * n - (n * n - r * r) * std::exp(chi2 / n);
    if (!(inner >= 0.0)) return std::nullopt;
    t = std::sqrt(inner);
  }
  return std::acos(std::clamp(t / r, -1.0, 1.0));
}

std::optional<double> confidence_interval(std::span<const double> angles,
                                          std::span<const double> weights, double level) {
  const Resultant r = mean_resultant(angles, weights);
  double n = static_cast<double>(angles.size());
  if (!weights.empty()) {
    double sw = 0.0;
    double sw2 = 0.0;
    for (double w : weights) {
      sw += w;
      sw2 += w * w;
    }
    n = sw * sw / sw2;
  }
  return confidence_halfwidth(r.length, n, level);
}

int one_sample_mean_test(double mean, double halfwidth, double alpha0) {
  return std::abs(wrap_angle(mean - alpha0)) <= halfwidth ? 0 : 1;
}

int one_sample_mean_test(std::span<const double> angles, double alpha0, double level) {
  const auto d = confidence_interval(angles, {}, level);
  if (!d) throw AnalysisError("confidence interval undefined: mean-angle test not performable");
  return one_sample_mean_test(mean_direction(angles), *d, alpha0);
}

double von_mises_kappa(double rbar) {
  if (rbar < 0.53) return 2.0 * rbar + std::pow(rbar, 3) + 5.0 * std::pow(rbar, 5) / 6.0;
  if (rbar < 0.85) return -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
  return 1.0 / (std::pow(rbar, 3) - 4.0 * rbar * rbar + 3.0 * rbar);
}

double watson_williams(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) {
    throw std::invalid_argument("watson_williams: at least two groups are required");
  }
  double n_total = 0.0;
  double sum_group_r = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  std::vector<double> group_means;
  for (const auto& g : groups) {
    if (g.size() < 2) {
      throw std::invalid_argument("watson_williams: every group needs at least two samples");
    }
    double gx = 0.0;
    double gy = 0.0;
    for (double a : g) {
      gx += std::sin(a);
      gy += std::cos(a);
    }
    sx += gx;
    sy += gy;
    sum_group_r += std::hypot(gx, gy);
    n_total += static_cast<double>(g.size());
    group_means.push_back(std::atan2(gx, gy));
  }
  const double r_total = std::hypot(sx, sy);
  const double k = static_cast<double>(groups.size());
  const double between = std::max(0.0, sum_group_r - r_total);
  const double within = n_total - sum_group_r;
  const double eps = 1e-12 * n_total;

  if (between <= eps) return 1.0;
  if (within <= eps) {
    // Perfectly concentrated groups: the means either coincide or they do not.
    const bool same = std::all_of(group_means.begin(), group_means.end(), [&](double m) {
      return std::abs(wrap_angle(m - group_means.front())) <= 1e-12;
    });
    return same ? 1.0 : 0.0;
  }
  const double kappa = von_mises_kappa(sum_group_r / n_total);
  const double correction = 1.0 + 3.0 / (8.0 * kappa);
  const double f = correction * (n_total - k) * between / ((k - 1.0) * within);
  return special::f_distribution_sf(f, k - 1.0, n_total - k);
}

LeadLag lead_lag(double alpha_hat, double halfwidth, double wavelength_minutes) {
  if (!(wavelength_minutes > 0.0)) throw std::invalid_argument("wavelength must be positive");
  return {alpha_hat / kTwoPi * wavelength_minutes, halfwidth / kTwoPi * wavelength_minutes};
}

std::string_view to_string(LeadClass c) {
  switch (c) {
    case LeadClass::PrimaryLeads:
      return "primary_leads";
    case LeadClass::SecondaryLeads:
      return "secondary_leads";
    case LeadClass::Undecided:
      return "undecided";
    case LeadClass::NotPositivelyCorrelated:
      return "not_positively_correlated";
  }
  return "undecided";
}

LeadClass classify_lead(double alpha_w, double d_w) {
  if (std::abs(alpha_w) > kPi / 2.0) return LeadClass::NotPositivelyCorrelated;
  if (alpha_w - d_w > 0.0) return LeadClass::PrimaryLeads;
  if (alpha_w + d_w < 0.0) return LeadClass::SecondaryLeads;
  return LeadClass::Undecided;
}

CircularSummary summarize(std::span<const double> angles, double hat_center, double level) {
  require_nonempty(angles, "summarize");
  CircularSummary s;
  s.n = angles.size();
  const Resultant r = mean_resultant(angles);
  s.resultant_length = r.length;
  s.variance = 1.0 - r.length;
  if (r.length >= kZeroResultant) {
    const double mean = wrap_angle(std::atan2(r.x, r.y));
    s.mean_direction = mean;
    s.skewness = circular_skewness(angles, mean);
    s.kurtosis = circular_kurtosis(angles, mean);
    s.ci_halfwidth = confidence_halfwidth(r.length, static_cast<double>(s.n), level);
  }

  s.hat_center = wrap_angle(hat_center);
  const std::vector<double> w = hat_weights(angles, s.hat_center);
  double sw = 0.0;
  double sw2 = 0.0;
  for (double x : w) {
    sw += x;
    sw2 += x * x;
  }
  if (sw > 0.0) {
    const Resultant rw = mean_resultant(angles, w);
    s.weighted_resultant_length = rw.length;
    s.effective_n = sw * sw / sw2;
    if (rw.length >= kZeroResultant) {
      s.weighted_mean = wrap_angle(std::atan2(rw.x, rw.y));
      s.weighted_ci = confidence_halfwidth(rw.length, s.effective_n, level);
    }
  }
  return s;
}

}  // namespace leadlag
