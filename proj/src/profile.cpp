#include "gevmiss/profile.hpp"

#include <cmath>
#include <limits>

#include "gevmiss/errors.hpp"
#include "gevmiss/special.hpp"

namespace gevmiss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxOutwardSteps = 60;
constexpr double kStepGrowth = 1.5;
constexpr double kBisectionRelTol = 1e-6;
// Bounds further than this many (|point| + sigma) from the point are reported open.
constexpr double kMaxSpan = 1e3;

double log_y_for(double r) { return std::log(-std::log1p(-1.0 / r)); }

}  // namespace

std::string_view to_string(IntervalMethod m) noexcept {
  return m == IntervalMethod::profile ? "profile" : "delta";
}

IntervalMethod parse_interval_method(std::string_view name) {
  if (name == "profile") return IntervalMethod::profile;
  if (name == "delta") return IntervalMethod::delta;
  throw DomainError("unknown interval method '" + std::string(name) + "'");
}

ReturnLevelProfile::ReturnLevelProfile(const LogLikelihood& objective, double r)
    : objective_(&objective), r_(r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw DomainError("return period must be finite and > 1");
  log_y_ = log_y_for(r);
}

ReturnLevelProfile::Point ReturnLevelProfile::maximise(double z_r, double sigma, double xi) const {
  const auto& obj = *objective_;
  const double log_y = log_y_;
  const auto loglik_at = [&](double s, double x) {
    return obj(z_r - s * detail::rl_offset(x, log_y), s, x);
  };
  // Far from the warm start the implied location can leave the data outside the
  // support, so scan shapes and scales around it for the best feasible start.
  double best = loglik_at(sigma, xi);
  double start_sigma = sigma;
  double start_xi = xi;
  for (double scale : {1.0, 0.5, 2.0}) {
    for (int k = -10; k <= 30; ++k) {
      const double s = sigma * scale;
      const double x = xi + 0.05 * k;
      const double v = loglik_at(s, x);
      if (v > best) {
        best = v;
        start_sigma = s;
        start_xi = x;
      }
    }
  }
  if (!std::isfinite(best)) return {-kInf, sigma, xi};
  sigma = start_sigma;
  xi = start_xi;

  const optim::Objective neg = [&](const optim::Vector& v) {
    return -loglik_at(std::exp(v[0]), v[1]);
  };
  optim::Vector x0(2);
  x0 << std::log(sigma), xi;
  optim::Vector steps(2);
  steps << 0.05, 0.02;
  const auto res = optim::nelder_mead(neg, x0, steps);
  return {-res.value, std::exp(res.x[0]), res.x[1]};
}

double return_level_se(const FitResult& fit, double r) {
  const double log_y = log_y_for(r);
  const auto& p = fit.params;
  Eigen::Vector3d grad(1.0, detail::rl_offset(p.xi(), log_y),
                       p.sigma() * detail::rl_offset_dxi(p.xi(), log_y));
  const double var = grad.dot(fit.vcov * grad);
  return var > 0.0 ? std::sqrt(var) : std::numeric_limits<double>::quiet_NaN();
}

ReturnLevelEstimate return_level_interval(const LogLikelihood& objective, const FitResult& fit,
                                          double r, double level, IntervalMethod method) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  ReturnLevelEstimate est;
  est.period_r = r;
  est.method = method;
  est.point = return_level(r, fit.params);
  if (!fit.converged) {
    est.ok = false;
    est.lo = est.hi = std::numeric_limits<double>::quiet_NaN();
    est.message = "fit did not converge";
    return est;
  }
  double se = return_level_se(fit, r);

  if (method == IntervalMethod::delta) {
    const double zq = special::normal_quantile(0.5 * (1.0 + level));
    if (!std::isfinite(se)) {
      est.ok = false;
      est.lo = est.hi = std::numeric_limits<double>::quiet_NaN();
      est.message = "delta-method variance is not positive";
      return est;
    }
    est.lo = est.point - zq * se;
    est.hi = est.point + zq * se;
    return est;
  }

  const ReturnLevelProfile profile(objective, r);
  const double cutoff = special::chi_square1_quantile(level);
  const double l_hat = fit.loglik;
  const double sigma_hat = fit.params.sigma();
  if (!std::isfinite(se) || se <= 0.0) se = 0.1 * sigma_hat;

  struct State {
    double z;
    double sigma;
    double xi;
  };

  const auto bound = [&](double direction, bool& open) {
    State inside{est.point, sigma_hat, fit.params.xi()};
    double step = 0.5 * se;
    const double span = kMaxSpan * (std::abs(est.point) + sigma_hat);
    for (int k = 0; k < kMaxOutwardSteps && std::abs(inside.z - est.point) < span; ++k) {
      const double z = inside.z + direction * step;
      const auto pt = profile.maximise(z, inside.sigma, inside.xi);
      if (2.0 * (l_hat - pt.loglik) <= cutoff) {
        inside = {z, pt.sigma, pt.xi};
        step *= kStepGrowth;
        continue;
      }
      double outside = z;
      const double tol = kBisectionRelTol * (std::abs(est.point) + sigma_hat);
      while (std::abs(outside - inside.z) > tol) {
        const double mid = 0.5 * (inside.z + outside);
        const auto mp = profile.maximise(mid, inside.sigma, inside.xi);
        if (2.0 * (l_hat - mp.loglik) <= cutoff) {
          inside = {mid, mp.sigma, mp.xi};
        } else {
          outside = mid;
        }
      }
      return 0.5 * (inside.z + outside);
    }
    open = true;
    return direction * kInf;
  };

  est.lo = bound(-1.0, est.lower_open);
  est.hi = bound(+1.0, est.upper_open);
  if (est.upper_open || est.lower_open) {
    est.message = "profile deviance did not reach the cutoff on at least one side";
  }
  return est;
}

ReturnLevelEstimate profile_return_level(const BlockMaximaSet& data, Estimator estimator,
                                         double r, double level, const FitOptions& options) {
  const LogLikelihood objective(data, estimator, options.discard_threshold);
  const FitResult f = fit(objective, options);
  return return_level_interval(objective, f, r, level, IntervalMethod::profile);
}

}  // namespace gevmiss
