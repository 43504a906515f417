#pragma once

// Distribution tails needed by the directional tests. Continued fractions use
// the modified Lentz method; target relative accuracy is ~1e-14 for moderate
// parameters and no worse than 1e-10 for degrees of freedom up to ~1e5.

namespace leadlag::special {

/// P(a, x) = gamma(a, x) / Gamma(a).
double regularized_gamma_p(double a, double x);
/// Q(a, x) = 1 - P(a, x), computed directly in the upper tail.
double regularized_gamma_q(double a, double x);

/// I_x(a, b).
double regularized_beta(double a, double b, double x);

double chi_square_cdf(double x, double df);
/// Inverse of chi_square_cdf for p in (0, 1).
double chi_square_quantile(double p, double df);

/// Upper tail P(F > f) of the F distribution with (df1, df2) degrees of freedom.
double f_distribution_sf(double f, double df1, double df2);

}  // namespace leadlag::special
