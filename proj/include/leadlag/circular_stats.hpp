#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace leadlag {

/// Maps any angle to [-pi, pi).
double wrap_angle(double angle);

/// Resultant lengths below this are treated as zero (no unique direction).
inline constexpr double kZeroResultant = 1e-12;

/// Mean of the unit vectors (sin a, cos a): x is the sine component, y the
/// cosine component.
struct Resultant {
  double x = 0.0;
  double y = 0.0;
  double length = 0.0;
};

/// Weighted when `weights` is non-empty. Throws std::invalid_argument for
/// empty input, mismatched or negative weights, or weights summing to zero.
Resultant mean_resultant(std::span<const double> angles, std::span<const double> weights = {});

/// Direction of the mean resultant in [-pi, pi). Throws AnalysisError when the
/// resultant vanishes.
double mean_direction(std::span<const double> angles, std::span<const double> weights = {});

double circular_variance(std::span<const double> angles, std::span<const double> weights = {});
double circular_skewness(std::span<const double> angles, double mean);
double circular_kurtosis(std::span<const double> angles, double mean);

/// Triangular weights: 1 at `center`, 0 at its antipode.
std::vector<double> hat_weights(std::span<const double> angles, double center = 0.0);

/// Centre of the fullest of `bins` equal-width bins on [-pi, pi) (first on ties).
double histogram_mode(std::span<const double> angles, int bins);

/// Confidence-interval halfwidth for the mean direction from the resultant
/// length and sample size (two-branch approximation for von Mises samples).
/// nullopt when the sample is too dispersed for the interval to exist.
std::optional<double> confidence_halfwidth(double mean_resultant_length, double sample_size,
                                           double level = 0.95);

/// Same, from data. With weights the effective size (sum w)^2 / sum w^2 and the
/// weighted resultant are used.
std::optional<double> confidence_interval(std::span<const double> angles,
                                          std::span<const double> weights = {},
                                          double level = 0.95);

/// 0 if alpha0 lies within mean +- halfwidth on the circle, 1 otherwise.
int one_sample_mean_test(double mean, double halfwidth, double alpha0 = 0.0);

/// Throws AnalysisError if the confidence interval is undefined.
int one_sample_mean_test(std::span<const double> angles, double alpha0 = 0.0,
                         double level = 0.95);

/// Piecewise approximation of the von Mises concentration for a given mean
/// resultant length.
double von_mises_kappa(double mean_resultant_length);

/// p-value of the Watson-Williams test for a common mean direction. Needs at
/// least two groups with two samples each.
double watson_williams(std::span<const std::vector<double>> groups);

struct LeadLag {
  double lead = 0.0;  // same unit as the wavelength; positive: primary leads
  double ci = 0.0;
};

LeadLag lead_lag(double alpha_hat, double halfwidth, double wavelength_minutes);

enum class LeadClass { PrimaryLeads, SecondaryLeads, Undecided, NotPositivelyCorrelated };

std::string_view to_string(LeadClass c);

LeadClass classify_lead(double alpha_w, double d_w);

struct CircularSummary {
  std::size_t n = 0;
  std::optional<double> mean_direction;
  double resultant_length = 0.0;
  double variance = 1.0;
  std::optional<double> skewness;
  std::optional<double> kurtosis;
  std::optional<double> ci_halfwidth;
  // Hat-weighted counterparts.
  double hat_center = 0.0;
  std::optional<double> weighted_mean;
  double weighted_resultant_length = 0.0;
  double effective_n = 0.0;
  std::optional<double> weighted_ci;
};

/// All moments and intervals of one sample. Undefined quantities stay empty
/// instead of throwing. Throws std::invalid_argument on empty input.
CircularSummary summarize(std::span<const double> angles, double hat_center = 0.0,
                          double level = 0.95);

}  // namespace leadlag
