#pragma once

#include <string>

#include "gevmiss/fit.hpp"
#include "gevmiss/likelihood.hpp"

namespace gevmiss {

enum class IntervalMethod { profile, delta };

[[nodiscard]] std::string_view to_string(IntervalMethod m) noexcept;
[[nodiscard]] IntervalMethod parse_interval_method(std::string_view name);

struct ReturnLevelEstimate {
  double period_r = 0.0;
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  IntervalMethod method = IntervalMethod::profile;
  /// The deviance never reached the cutoff on that side; the bound is +-inf.
  bool lower_open = false;
  bool upper_open = false;
  bool ok = true;
  std::string message;
};

/// Profile log-likelihood of the r-block return level: the objective is
/// maximised over (sigma, xi) with mu = z_r - sigma * offset(xi, r).
class ReturnLevelProfile {
 public:
  ReturnLevelProfile(const LogLikelihood& objective, double r);

  struct Point {
    double loglik;
    double sigma;
    double xi;
  };

  /// Maximise at a fixed return level, starting the simplex at (sigma, xi).
  [[nodiscard]] Point maximise(double z_r, double sigma, double xi) const;
  [[nodiscard]] double period() const noexcept { return r_; }

 private:
  const LogLikelihood* objective_;
  double r_;
  double log_y_;
};

/// Delta-method standard error of the return level from the fit's covariance.
[[nodiscard]] double return_level_se(const FitResult& fit, double r);

/// Confidence interval for the r-block return level. With the profile
/// method the interval is {z : 2 (l_hat - l_prof(z)) <= chi2_1(level)},
/// bracketed by stepping outward from the point estimate with geometrically
/// growing steps and then refined by bisection to 1e-6 relative.
[[nodiscard]] ReturnLevelEstimate return_level_interval(const LogLikelihood& objective,
                                                       const FitResult& fit, double r,
                                                       double level,
                                                       IntervalMethod method = IntervalMethod::profile);

/// Fit `estimator` to `data` and profile the r-block return level.
[[nodiscard]] ReturnLevelEstimate profile_return_level(const BlockMaximaSet& data,
                                                      Estimator estimator, double r, double level,
                                                      const FitOptions& options = {});

}  // namespace gevmiss
