#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "gevmiss/errors.hpp"
#include "gevmiss/fit.hpp"
#include "gevmiss/likelihood.hpp"
#include "gevmiss/profile.hpp"
#include "test_util.hpp"

using namespace gevmiss;
using Catch::Approx;

namespace {

BlockMaximaSet with_random_missingness(const std::vector<double>& maxima, std::int64_t n,
                                       std::uint64_t seed, std::int64_t min_obs = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> n_obs(min_obs > 0 ? min_obs : n / 2, n);
  std::vector<std::int64_t> counts(maxima.size());
  for (auto& c : counts) c = n_obs(rng);
  return BlockMaximaSet::from_maxima(maxima, counts, n);
}

const BlockMaximaSet& toy_five() {
  static const BlockMaximaSet data = [] {
    const std::vector<double> m{0.4, 2.1, -0.3, 1.2, 0.9};
    const std::vector<std::int64_t> n_obs{90, 45, 80, 63, 30};
    return BlockMaximaSet::from_maxima(m, n_obs, 90);
  }();
  return data;
}

}  // namespace

TEST_CASE("loglik_adjusted examples", "[inference][loglik]") {
  const auto m = testutil::gev_sample(40, 3.0, 1.5, 0.1, 11);
  const auto complete = BlockMaximaSet::complete(m, 100);
  const GevParams p{3.1, 1.4, 0.12};
  CHECK(loglik_adjusted(complete, p) == Approx(loglik_unweighted(complete, p)).margin(1e-12));

  const auto single = BlockMaximaSet::complete(std::vector<double>{0.0}, 10);
  CHECK(loglik_adjusted(single, {0, 1, 0}) == Approx(-1.0).margin(1e-15));

  // Independent re-implementation with pow-based formulas.
  const GevParams q{0.0, 1.0, 0.1};
  double expected = 0.0;
  for (const auto& b : toy_five().blocks()) {
    double mu_i = 0.0;
    double sigma_i = 0.0;
    testutil::reference_adjust(0.0, 1.0, 0.1, static_cast<double>(b.n_obs) / b.n_full, mu_i,
                               sigma_i);
    expected += testutil::reference_log_density(b.maximum, mu_i, sigma_i, 0.1);
  }
  CHECK(loglik_adjusted(toy_five(), q) == Approx(expected).margin(1e-10));

  // A maximum below the common lower endpoint mu - sigma/xi.
  const auto outside = BlockMaximaSet::complete(std::vector<double>{-20.0, 1.0}, 10);
  CHECK(loglik_adjusted(outside, {0, 1, 0.1}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("loglik_weighted examples", "[inference][loglik]") {
  const auto m = testutil::gev_sample(25, 0.0, 1.0, -0.1, 3);
  const auto complete = BlockMaximaSet::complete(m, 50);
  const GevParams p{0.1, 0.9, -0.05};
  const double plain = loglik_unweighted(complete, p);
  CHECK(loglik_weighted(complete, p, WeightScheme::weight1) == Approx(plain).margin(1e-12));
  CHECK(loglik_weighted(complete, p, WeightScheme::weight2) == Approx(plain).margin(1e-12));

  const auto two = BlockMaximaSet::from_maxima(std::vector<double>{1.3, 2.4},
                                               std::vector<std::int64_t>{5, 10}, 10);
  const GevParams g{1.0, 1.0, 0.0};
  CHECK(loglik_weighted(two, g, WeightScheme::weight1) ==
        Approx(0.5 * gev_log_pdf(1.3, g) + gev_log_pdf(2.4, g)).margin(1e-14));

  // Hand enumeration: ecdf ranks {4, 2, 5, 2, 3} / 5 with ties counted inclusively.
  const auto toy = BlockMaximaSet::from_maxima(std::vector<double>{3.0, 1.0, 4.0, 1.0, 2.0},
                                               std::vector<std::int64_t>{10, 8, 9, 5, 7}, 10);
  const auto w = likelihood_weights(toy, WeightScheme::weight2);
  REQUIRE(w.size() == 5);
  CHECK(w[0] == Approx(1.0).margin(1e-15));
  CHECK(w[1] == Approx(0.16).margin(1e-15));
  CHECK(w[2] == Approx(1.0).margin(1e-15));
  CHECK(w[3] == Approx(0.01024).margin(1e-15));
  CHECK(w[4] == Approx(0.216).margin(1e-15));
  const auto w1 = likelihood_weights(toy, WeightScheme::weight1);
  CHECK(w1[1] == Approx(0.8).margin(1e-15));
}

TEST_CASE("LogLikelihood objective matches the free functions", "[inference][loglik]") {
  const auto m = testutil::gev_sample(60, 10.0, 2.0, 0.05, 5);
  const auto data = with_random_missingness(m, 90, 6);
  const GevParams p{10.2, 2.1, 0.03};
  CHECK(LogLikelihood(data, Estimator::adjust)(p) == Approx(loglik_adjusted(data, p)).epsilon(1e-13));
  CHECK(LogLikelihood(data, Estimator::naive)(p) == Approx(loglik_unweighted(data, p)).epsilon(1e-13));
  CHECK(LogLikelihood(data, Estimator::weight1)(p) ==
        Approx(loglik_weighted(data, p, WeightScheme::weight1)).epsilon(1e-13));
  CHECK(LogLikelihood(data, Estimator::weight2)(p) ==
        Approx(loglik_weighted(data, p, WeightScheme::weight2)).epsilon(1e-13));
  const auto kept = data.retain_by_missingness(0.10);
  CHECK(LogLikelihood(data, Estimator::discard)(p) == Approx(loglik_unweighted(kept, p)).epsilon(1e-13));
  CHECK(LogLikelihood(data, Estimator::naive)(10.0, -1.0, 0.0) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("discard keeps blocks with at most the threshold missing", "[inference][discard]") {
  const auto data = BlockMaximaSet::from_maxima(std::vector<double>{1, 2, 3, 4},
                                                std::vector<std::int64_t>{90, 81, 80, 45}, 90);
  CHECK(data.retain_by_missingness(0.10).size() == 2);
  CHECK(data.retain_by_missingness(0.50).size() == 4);

  const auto sparse = BlockMaximaSet::from_maxima(std::vector<double>{1, 2, 3},
                                                  std::vector<std::int64_t>{70, 60, 80}, 90);
  try {
    (void)fit(sparse, Estimator::discard);
    FAIL("expected InsufficientDataError");
  } catch (const InsufficientDataError& e) {
    CHECK(e.count() == 0);
  }
  CHECK_THROWS_AS(fit(BlockMaximaSet::complete(std::vector<double>{1.0}, 10), Estimator::naive),
                  InsufficientDataError);
}

TEST_CASE("full-data MLE recovers GEV(0,1,0.2)", "[inference][fit]") {
  const auto m = testutil::gev_sample(10000, 0.0, 1.0, 0.2, 2024);
  const auto data = BlockMaximaSet::complete(m, 365);
  const auto f = fit(data, Estimator::full);
  REQUIRE(f.converged);
  CHECK(f.n_blocks_used == 10000);
  CHECK(std::abs(f.params.mu() - 0.0) < 4 * f.se[0]);
  CHECK(std::abs(f.params.sigma() - 1.0) < 4 * f.se[1]);
  CHECK(std::abs(f.params.xi() - 0.2) < 4 * f.se[2]);
  for (int i = 0; i < 3; ++i) {
    CHECK(f.se[i] == Approx(std::sqrt(f.vcov(i, i))).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) CHECK(f.vcov(i, j) == Approx(f.vcov(j, i)).epsilon(1e-12));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(f.vcov);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("fitted optimum is first-order stationary", "[inference][fit][property]") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto m = testutil::gev_sample(50, 5.0, 0.8, 0.1, seed);
    // weight2 down-weights heavily incomplete blocks to near zero, so keep missingness light.
    const auto data = with_random_missingness(m, 90, seed + 100, 81);
    for (auto e : {Estimator::adjust, Estimator::naive, Estimator::weight1, Estimator::weight2,
                   Estimator::discard}) {
      const LogLikelihood obj(data, e, 0.5);
      const auto f = fit(obj, FitOptions{.discard_threshold = 0.5});
      REQUIRE(f.converged);
      const optim::Objective ll = [&](const optim::Vector& v) { return obj(v[0], v[1], v[2]); };
      optim::Vector th(3);
      th << f.params.mu(), f.params.sigma(), f.params.xi();
      const auto g = optim::numeric_gradient(ll, th, optim::relative_steps(th, 1e-6));
      INFO("estimator " << to_string(e) << " seed " << seed);
      CHECK(g.cwiseAbs().maxCoeff() < 1e-4 * (1 + std::abs(f.loglik)));
    }
  }
}

TEST_CASE("estimators coincide without missing data", "[inference][fit][property]") {
  const auto m = testutil::gev_sample(50, 2.0, 1.0, -0.1, 77);
  const auto data = BlockMaximaSet::complete(m, 90);
  const auto naive = fit(data, Estimator::naive);
  REQUIRE(naive.converged);
  for (auto e : {Estimator::adjust, Estimator::weight1, Estimator::weight2, Estimator::discard,
                 Estimator::full}) {
    const auto f = fit(data, e);
    REQUIRE(f.converged);
    INFO(to_string(e));
    CHECK(f.params.mu() == Approx(naive.params.mu()).margin(1e-6));
    CHECK(f.params.sigma() == Approx(naive.params.sigma()).margin(1e-6));
    CHECK(f.params.xi() == Approx(naive.params.xi()).margin(1e-6));
  }
}

TEST_CASE("location shift moves mu and return level only", "[inference][fit][property]") {
  const auto m = testutil::gev_sample(50, 1.0, 0.7, 0.15, 8);
  const auto data = with_random_missingness(m, 90, 9, 81);
  const double c = 37.25;
  const auto moved = data.shifted(c);
  for (auto e : {Estimator::adjust, Estimator::naive, Estimator::weight1, Estimator::weight2,
                 Estimator::discard}) {
    const FitOptions opts{.discard_threshold = 0.5};
    const auto a = fit(data, e, opts);
    const auto b = fit(moved, e, opts);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    INFO(to_string(e));
    CHECK(b.params.mu() - a.params.mu() == Approx(c).margin(1e-6));
    CHECK(b.params.sigma() == Approx(a.params.sigma()).margin(1e-6));
    CHECK(b.params.xi() == Approx(a.params.xi()).margin(1e-6));
    CHECK(return_level(100, b.params) - return_level(100, a.params) == Approx(c).margin(1e-5));
  }
}

TEST_CASE("adjusted fit inverts the common-ratio map of the naive fit", "[inference][fit]") {
  // With one shared ratio the adjusted MLE maps onto the naive MLE through G^rho.
  const auto m = testutil::gev_sample(400, 0.0, 1.0, 0.1, 123);
  const auto data = BlockMaximaSet::from_maxima(m, std::vector<std::int64_t>(m.size(), 50), 100);
  const auto adj = fit(data, Estimator::adjust);
  const auto naive = fit(data, Estimator::naive);
  REQUIRE(adj.converged);
  REQUIRE(naive.converged);
  const auto mapped = adjust_params(adj.params, 0.5);
  CHECK(mapped.mu() == Approx(naive.params.mu()).margin(1e-6));
  CHECK(mapped.sigma() == Approx(naive.params.sigma()).margin(1e-6));
  CHECK(mapped.xi() == Approx(naive.params.xi()).margin(1e-6));
  CHECK(adj.loglik == Approx(naive.loglik).margin(1e-8));
  CHECK(adj.params.mu() > naive.params.mu());
}

TEST_CASE("profile interval brackets the point estimate", "[inference][profile]") {
  const auto m = testutil::gev_sample(50, 10.0, 2.0, 0.05, 31);
  const auto data = with_random_missingness(m, 90, 32);
  const LogLikelihood obj(data, Estimator::adjust);
  const auto f = fit(obj);
  REQUIRE(f.converged);
  for (double r : {2.0, 25.0, 100.0}) {
    const auto est = return_level_interval(obj, f, r, 0.95);
    INFO("r = " << r);
    REQUIRE(est.ok);
    CHECK(est.point == Approx(return_level(r, f.params)).margin(1e-12));
    CHECK(est.lo < est.point);
    CHECK(est.point < est.hi);
    CHECK_FALSE(est.upper_open);

    // Deviance at the point estimate vanishes; at the bounds it equals the cutoff.
    const ReturnLevelProfile prof(obj, r);
    const auto at_point = prof.maximise(est.point, f.params.sigma(), f.params.xi());
    CHECK(std::abs(2 * (f.loglik - at_point.loglik)) < 1e-8);
    const auto at_hi = prof.maximise(est.hi, f.params.sigma(), f.params.xi());
    CHECK(2 * (f.loglik - at_hi.loglik) == Approx(3.841458820694124).margin(1e-3));
  }
  const auto delta = return_level_interval(obj, f, 100, 0.95, IntervalMethod::delta);
  CHECK(delta.hi - delta.point == Approx(delta.point - delta.lo).epsilon(1e-12));
  CHECK(delta.method == IntervalMethod::delta);
}

TEST_CASE("return-level se matches finite differences of the return level", "[inference][profile]") {
  FitResult f;
  f.params = GevParams(1.0, 2.0, 0.1);
  f.vcov = Eigen::Matrix3d::Identity();
  f.converged = true;
  const double r = 50.0;
  const double h = 1e-6;
  double sumsq = 0.0;
  for (int j = 0; j < 3; ++j) {
    double th[3] = {1.0, 2.0, 0.1};
    double tl[3] = {1.0, 2.0, 0.1};
    th[j] += h;
    tl[j] -= h;
    const double d = (return_level(r, {th[0], th[1], th[2]}) - return_level(r, {tl[0], tl[1], tl[2]})) /
                     (2 * h);
    sumsq += d * d;
  }
  CHECK(return_level_se(f, r) == Approx(std::sqrt(sumsq)).epsilon(1e-7));
}

TEST_CASE("profile interval width shrinks like 1/sqrt(b)", "[inference][profile][slow]") {
  const double truth = 4.60014922677658;
  std::vector<double> scaled_width;
  for (std::size_t b : {100u, 1000u, 10000u}) {
    double width = 0.0;
    const int reps = 4;
    for (int k = 0; k < reps; ++k) {
      const auto m = testutil::gev_sample(b, 0.0, 1.0, 0.0, 1000 * b + k);
      const auto est = profile_return_level(BlockMaximaSet::complete(m, 365), Estimator::full,
                                            100.0, 0.95);
      REQUIRE(est.ok);
      if (b == 10000u && k == 0) {
        CHECK(est.lo < truth);
        CHECK(truth < est.hi);
      }
      width += (est.hi - est.lo) / reps;
    }
    scaled_width.push_back(width * std::sqrt(static_cast<double>(b)));
  }
  for (std::size_t i = 1; i < scaled_width.size(); ++i) {
    const double ratio = scaled_width[i] / scaled_width[i - 1];
    CHECK(ratio > 1.0 / 1.5);
    CHECK(ratio < 1.5);
  }
}

TEST_CASE("flat upper profile is reported as an open bound", "[inference][profile]") {
  const auto m = testutil::gev_sample(8, 0.0, 1.0, 0.3, 1);
  const auto est = profile_return_level(BlockMaximaSet::complete(m, 10), Estimator::naive, 1000.0,
                                        0.999);
  REQUIRE(est.ok);
  CHECK(est.upper_open);
  CHECK(std::isinf(est.hi));
  CHECK_FALSE(est.lower_open);
  CHECK(est.lo < est.point);
}
