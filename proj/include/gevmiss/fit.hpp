#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "gevmiss/blocks.hpp"
#include "gevmiss/gev.hpp"
#include "gevmiss/likelihood.hpp"
#include "gevmiss/optimize.hpp"

namespace gevmiss {

struct FitOptions {
  /// Largest tolerated missing fraction for Estimator::discard.
  double discard_threshold = 0.10;
  optim::NelderMeadOptions simplex{};
  /// Relative step for the observed-information finite differences.
  double hessian_step = 1e-5;
  /// Newton refinement after the simplex search.
  bool polish = true;
};

struct FitResult {
  GevParams params = GevParams::unchecked(0.0, 1.0, 0.0);
  double loglik = 0.0;
  std::array<double, 3> se{};
  Eigen::Matrix3d vcov = Eigen::Matrix3d::Zero();
  bool converged = false;
  std::size_t n_blocks_used = 0;
  Estimator estimator = Estimator::adjust;
  int iterations = 0;
  /// Empty on success, otherwise why `converged` is false.
  std::string message;
};

/// Moment-based Gumbel start: sigma0 = sd * sqrt(6) / pi,
/// mu0 = mean - 0.5772 * sigma0, xi0 = 0.1.
[[nodiscard]] GevParams moment_start(const BlockMaximaSet& data);

/// Maximum-likelihood fit of `estimator`. Throws InsufficientDataError when
/// fewer than two blocks are usable; optimiser failures and non-invertible
/// information are reported through FitResult::converged.
[[nodiscard]] FitResult fit(const BlockMaximaSet& data, Estimator estimator,
                            const FitOptions& options = {});

/// Same, for an objective that has already been built.
[[nodiscard]] FitResult fit(const LogLikelihood& objective, const FitOptions& options = {});

}  // namespace gevmiss
