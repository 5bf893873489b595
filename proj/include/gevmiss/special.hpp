#pragma once

namespace gevmiss::special {

double normal_cdf(double z);
/// Inverse standard normal CDF, accurate to ~1e-15 on (0, 1).
double normal_quantile(double p);

/// Regularised incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);
/// Inverse of incomplete_beta in x, found by safeguarded Newton iteration.
double beta_quantile(double a, double b, double p);

/// Quantile of the chi-squared distribution with one degree of freedom.
double chi_square1_quantile(double p);

}  // namespace gevmiss::special
