#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gevmiss/gev.hpp"

namespace gevmiss {

struct InformationOptions {
  /// Total Monte Carlo draws, used in antithetic pairs.
  std::size_t draws = 1'000'000;
  std::uint64_t seed = 0x5eed1f0e;
};

/// d log g(y; theta) / d theta for theta = (mu, sigma, xi), by central
/// differences with step 1e-6 (1 + |theta_j|).
[[nodiscard]] Eigen::Vector3d gev_score(double y, const GevParams& p);

/// Expected (Fisher) information per observation, estimated as the Monte
/// Carlo mean of score outer products over GEV draws.
[[nodiscard]] Eigen::Matrix3d expected_information(const GevParams& p,
                                                   const InformationOptions& options = {});

/// Gradient of the r-block return level in (mu, sigma, xi).
[[nodiscard]] Eigen::Vector3d return_level_gradient(const GevParams& p, double r);

/// y = G^{-1}(Phi(z)) and its inverse.
[[nodiscard]] double normal_to_gev(double z, const GevParams& p);
[[nodiscard]] double gev_to_normal(double y, const GevParams& p);

/// 201 points on [-4, 4].
[[nodiscard]] std::vector<double> default_influence_grid();

struct InfluenceCurve {
  std::vector<double> grid_z;
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> xi;
  std::vector<double> periods;
  /// rl[k][j]: influence on the periods[k] return level at grid_z[j].
  std::vector<std::vector<double>> rl;
  GevParams params = GevParams::unchecked(0.0, 1.0, 0.0);
  Eigen::Matrix3d information = Eigen::Matrix3d::Zero();
};

/// Influence of an observation at each normal-scale grid point on the MLE
/// of (mu, sigma, xi) and on each requested return level. Throws
/// SingularMatrixError if the information cannot be inverted.
[[nodiscard]] InfluenceCurve influence_curves(const GevParams& p, const std::vector<double>& grid,
                                              const std::vector<double>& periods = {},
                                              const InformationOptions& options = {});

[[nodiscard]] InfluenceCurve influence_params(const GevParams& p, const std::vector<double>& grid,
                                              const InformationOptions& options = {});

[[nodiscard]] std::vector<double> influence_return_level(const GevParams& p, double r,
                                                         const std::vector<double>& grid,
                                                         const InformationOptions& options = {});

/// Influence vector at a single observation given a precomputed information.
[[nodiscard]] Eigen::Vector3d influence_at(double y, const GevParams& p,
                                           const Eigen::Matrix3d& information);

}  // namespace gevmiss
