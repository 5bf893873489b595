#include "gevmiss/influence.hpp"

#include <cmath>
#include <random>

#include "gevmiss/errors.hpp"
#include "gevmiss/special.hpp"

namespace gevmiss {

namespace {

constexpr double kScoreStep = 1e-6;

Eigen::Matrix3d invert(const Eigen::Matrix3d& info) {
  Eigen::LLT<Eigen::Matrix3d> llt(info);
  if (llt.info() != Eigen::Success || !info.allFinite()) {
    throw SingularMatrixError("expected information is singular or not positive definite");
  }
  return llt.solve(Eigen::Matrix3d::Identity());
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw DomainError("influence grid must be finite");
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw DomainError("influence grid must be strictly increasing");
    }
  }
}

}  // namespace

Eigen::Vector3d gev_score(double y, const GevParams& p) {
  const double theta[3] = {p.mu(), p.sigma(), p.xi()};
  Eigen::Vector3d out;
  for (int j = 0; j < 3; ++j) {
    const double h = kScoreStep * (1.0 + std::abs(theta[j]));
    double up[3] = {theta[0], theta[1], theta[2]};
    double dn[3] = {theta[0], theta[1], theta[2]};
    up[j] += h;
    dn[j] -= h;
    out[j] = (detail::log_pdf_raw(y, up[0], up[1], up[2]) -
              detail::log_pdf_raw(y, dn[0], dn[1], dn[2])) /
             (2.0 * h);
  }
  return out;
}

Eigen::Matrix3d expected_information(const GevParams& p, const InformationOptions& options) {
  if (options.draws < 2) throw DomainError("information estimate needs at least two draws");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  std::size_t used = 0;
  const std::size_t pairs = options.draws / 2;
  for (std::size_t k = 0; k < pairs; ++k) {
    double u = unif(rng);
    while (u <= 0.0 || u >= 1.0) u = unif(rng);
    for (double q : {u, 1.0 - u}) {
      const Eigen::Vector3d s = gev_score(detail::quantile_raw(q, p.mu(), p.sigma(), p.xi()), p);
      if (!s.allFinite()) continue;
      sum.noalias() += s * s.transpose();
      ++used;
    }
  }
  if (used == 0) throw SingularMatrixError("no finite scores in the information estimate");
  Eigen::Matrix3d info = sum / static_cast<double>(used);
  return 0.5 * (info + info.transpose());
}

Eigen::Vector3d return_level_gradient(const GevParams& p, double r) {
  if (!(r > 1.0)) throw DomainError("return period must exceed 1");
  const double log_y = std::log(-std::log1p(-1.0 / r));
  return {1.0, detail::rl_offset(p.xi(), log_y), p.sigma() * detail::rl_offset_dxi(p.xi(), log_y)};
}

double normal_to_gev(double z, const GevParams& p) {
  return gev_quantile(special::normal_cdf(z), p);
}

double gev_to_normal(double y, const GevParams& p) {
  return special::normal_quantile(gev_cdf(y, p));
}

std::vector<double> default_influence_grid() {
  std::vector<double> out(201);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -4.0 + 0.04 * static_cast<double>(k);
  return out;
}

Eigen::Vector3d influence_at(double y, const GevParams& p, const Eigen::Matrix3d& information) {
  return invert(information) * gev_score(y, p);
}

InfluenceCurve influence_curves(const GevParams& p, const std::vector<double>& grid,
                                const std::vector<double>& periods,
                                const InformationOptions& options) {
  check_grid(grid);
  InfluenceCurve out;
  out.params = p;
  out.grid_z = grid;
  out.periods = periods;
  out.information = expected_information(p, options);
  const Eigen::Matrix3d inv = invert(out.information);
  std::vector<Eigen::Vector3d> grads;
  for (double r : periods) grads.push_back(return_level_gradient(p, r));
  out.rl.assign(periods.size(), {});
  for (double z : grid) {
    const Eigen::Vector3d v = inv * gev_score(normal_to_gev(z, p), p);
    out.mu.push_back(v[0]);
    out.sigma.push_back(v[1]);
    out.xi.push_back(v[2]);
    for (std::size_t k = 0; k < periods.size(); ++k) out.rl[k].push_back(grads[k].dot(v));
  }
  return out;
}

InfluenceCurve influence_params(const GevParams& p, const std::vector<double>& grid,
                                const InformationOptions& options) {
  return influence_curves(p, grid, {}, options);
}

std::vector<double> influence_return_level(const GevParams& p, double r,
                                           const std::vector<double>& grid,
                                           const InformationOptions& options) {
  return influence_curves(p, grid, {r}, options).rl.front();
}

}  // namespace gevmiss
