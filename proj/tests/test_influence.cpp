#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gevmiss/errors.hpp"
#include "gevmiss/fit.hpp"
#include "gevmiss/influence.hpp"
#include "test_util.hpp"

using namespace gevmiss;
using Catch::Approx;

namespace {

// A smaller information sample keeps the suite quick where 1e6 draws are not needed.
const InformationOptions kQuick{200'000, 99};

}  // namespace

TEST_CASE("score matches analytic Gumbel derivatives", "[influence]") {
  const GevParams p{0.5, 2.0, 0.0};
  for (double y : {-1.0, 0.5, 3.0, 8.0}) {
    const double w = (y - 0.5) / 2.0;
    const auto s = gev_score(y, p);
    CHECK(s[0] == Approx((1.0 - std::exp(-w)) / 2.0).margin(1e-7));
    CHECK(s[1] == Approx((-1.0 + w - w * std::exp(-w)) / 2.0).margin(1e-7));
  }
}

TEST_CASE("expected information is symmetric and positive definite", "[influence][property]") {
  for (double xi : {-0.45, -0.2, 0.0, 0.1, 0.4}) {
    const GevParams p{0.0, 1.0, xi};
    const auto info = expected_information(p, kQuick);
    INFO("xi = " << xi);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(info(i, j) - info(j, i)) <= 1e-8 * std::abs(info(i, j)) + 1e-300);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(info);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
  // Known closed form for the Gumbel (mu, mu) entry is 1/sigma^2.
  const auto g = expected_information({0.0, 2.0, 0.0});
  CHECK(g(0, 0) == Approx(0.25).epsilon(0.01));
}

TEST_CASE("influence has mean zero under the model", "[influence][property]") {
  const GevParams p{1.0, 1.5, 0.1};
  const auto info = expected_information(p);
  const Eigen::Matrix3d inv = info.inverse();
  const auto y = testutil::gev_sample(100'000, 1.0, 1.5, 0.1, 321);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d sumsq = Eigen::Vector3d::Zero();
  for (double v : y) {
    const Eigen::Vector3d ifv = inv * gev_score(v, p);
    sum += ifv;
    sumsq += ifv.cwiseProduct(ifv);
  }
  const double n = static_cast<double>(y.size());
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / n;
    const double se = std::sqrt((sumsq[j] / n - mean * mean) / n);
    INFO("component " << j);
    CHECK(std::abs(mean) < 3.0 * se);
  }
}

TEST_CASE("mu and sigma influence scale with sigma", "[influence][property]") {
  const auto grid = default_influence_grid();
  const auto one = influence_params({0.0, 1.0, 0.2}, grid, kQuick);
  const auto two = influence_params({0.0, 2.0, 0.2}, grid, kQuick);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(two.mu[k] == Approx(2.0 * one.mu[k]).margin(1e-6 * (1 + std::abs(one.mu[k]))));
    CHECK(two.sigma[k] == Approx(2.0 * one.sigma[k]).margin(1e-6 * (1 + std::abs(one.sigma[k]))));
    CHECK(two.xi[k] == Approx(one.xi[k]).margin(1e-6 * (1 + std::abs(one.xi[k]))));
  }
}

TEST_CASE("return-level gradient", "[influence]") {
  for (double r : {25.0, 50.0, 100.0}) {
    const auto g = return_level_gradient({3.0, 2.0, 0.0}, r);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == Approx(-std::log(-std::log(1.0 - 1.0 / r))).margin(1e-12));
    for (double xi : {-0.3, 0.0, 0.25}) {
      const GevParams p{3.0, 2.0, xi};
      const auto grad = return_level_gradient(p, r);
      const double h = 1e-5;
      const double fd_sigma = (return_level(r, {3.0, 2.0 + h, xi}) - return_level(r, {3.0, 2.0 - h, xi})) / (2 * h);
      const double fd_xi = (return_level(r, {3.0, 2.0, xi + h}) - return_level(r, {3.0, 2.0, xi - h})) / (2 * h);
      CHECK(grad[1] == Approx(fd_sigma).margin(1e-6));
      CHECK(grad[2] == Approx(fd_xi).margin(1e-6 * (1 + std::abs(fd_xi))));
    }
  }
}

TEST_CASE("normal-scale mapping round trips", "[influence][property]") {
  for (double xi : {-0.3, 0.0, 0.3}) {
    const GevParams p{1.0, 0.5, xi};
    for (double z : default_influence_grid()) {
      REQUIRE(std::abs(gev_to_normal(normal_to_gev(z, p), p) - z) < 1e-10);
    }
  }
}

TEST_CASE("influence curves on the default grid", "[influence]") {
  const auto grid = default_influence_grid();
  REQUIRE(grid.size() == 201);
  CHECK(grid.front() == -4.0);
  CHECK(grid.back() == Approx(4.0).margin(1e-12));
  const auto c = influence_curves({0.0, 1.0, 0.1}, grid, {25.0, 50.0, 100.0}, kQuick);
  REQUIRE(c.rl.size() == 3);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(std::isfinite(c.mu[k]));
    REQUIRE(std::isfinite(c.sigma[k]));
    REQUIRE(std::isfinite(c.xi[k]));
  }
  // At z = +3 influence on the return level grows with the period.
  const std::size_t at3 = 175;
  REQUIRE(grid[at3] == Approx(3.0).margin(1e-12));
  CHECK(c.rl[0][at3] < c.rl[1][at3]);
  CHECK(c.rl[1][at3] < c.rl[2][at3]);
  const auto single = influence_return_level({0.0, 1.0, 0.1}, 50.0, grid, kQuick);
  CHECK(single[at3] == Approx(c.rl[1][at3]).epsilon(1e-12));

  CHECK_THROWS_AS(influence_params({0, 1, 0}, {0.0, -1.0}, kQuick), DomainError);
}

TEST_CASE("influence predicts the effect of replacing one observation", "[influence][slow]") {
  // First-order regime: replace one value by the fitted 95% quantile.
  const std::size_t b = 2000;
  for (double xi : {-0.2, 0.0, 0.1}) {
    const auto m = testutil::gev_sample(b, 0.0, 1.0, xi, 17);
    const auto base = fit(BlockMaximaSet::complete(m, 365), Estimator::full);
    REQUIRE(base.converged);
    const auto info = expected_information(base.params);
    auto moved = m;
    const double y_old = moved[0];
    const double y_new = gev_quantile(0.95, base.params);
    moved[0] = y_new;
    const auto refit = fit(BlockMaximaSet::complete(moved, 365), Estimator::full);
    REQUIRE(refit.converged);
    const Eigen::Vector3d actual(refit.params.mu() - base.params.mu(),
                                 refit.params.sigma() - base.params.sigma(),
                                 refit.params.xi() - base.params.xi());
    const Eigen::Vector3d predicted =
        (influence_at(y_new, base.params, info) - influence_at(y_old, base.params, info)) /
        static_cast<double>(b);
    INFO("xi = " << xi << " actual " << actual.transpose() << " predicted " << predicted.transpose());
    for (int j = 0; j < 3; ++j) CHECK(std::abs(actual[j] - predicted[j]) < 0.15 * std::abs(predicted[j]));

    const double rl_actual = return_level(100, refit.params) - return_level(100, base.params);
    const double rl_predicted = return_level_gradient(base.params, 100).dot(predicted);
    CHECK(std::abs(rl_actual - rl_predicted) < 0.15 * std::abs(rl_predicted));
  }
}

TEST_CASE("singular information is reported", "[influence]") {
  Eigen::Matrix3d singular = Eigen::Matrix3d::Zero();
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(influence_at(0.0, {0, 1, 0}, singular), SingularMatrixError);
}
