#include "gevmiss/fit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gevmiss {

namespace {

constexpr double kEulerGamma = 0.5772;

}  // namespace

GevParams moment_start(const BlockMaximaSet& data) {
  const auto m = data.maxima();
  const double n = static_cast<double>(m.size());
  const double mean = std::accumulate(m.begin(), m.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : m) ss += (v - mean) * (v - mean);
  double sd = m.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  if (!(sd > 0.0)) sd = std::max(1e-8, 1e-8 * std::abs(mean));
  const double sigma0 = sd * std::sqrt(6.0) / std::numbers::pi;
  return GevParams(mean - kEulerGamma * sigma0, sigma0, 0.1);
}

FitResult fit(const BlockMaximaSet& data, Estimator estimator, const FitOptions& options) {
  const LogLikelihood objective(data, estimator, options.discard_threshold);
  return fit(objective, options);
}

FitResult fit(const LogLikelihood& objective, const FitOptions& options) {
  FitResult out;
  out.estimator = objective.estimator();
  out.n_blocks_used = objective.blocks_used();

  const GevParams start = moment_start(objective.data());
  double xi0 = start.xi();
  if (!std::isfinite(objective(start.mu(), start.sigma(), xi0))) xi0 = 0.0;

  // Simplex search over (mu, log sigma, xi).
  const optim::Objective neg_internal = [&](const optim::Vector& v) {
    return -objective(v[0], std::exp(v[1]), v[2]);
  };
  optim::Vector x0(3);
  x0 << start.mu(), std::log(start.sigma()), xi0;
  optim::Vector steps(3);
  steps << 0.25 * start.sigma(), 0.25, 0.1;
  const auto nm = optim::nelder_mead(neg_internal, x0, steps, options.simplex);
  out.iterations = nm.iterations;

  const optim::Objective neg_natural = [&](const optim::Vector& v) {
    return -objective(v[0], v[1], v[2]);
  };
  optim::Vector theta(3);
  theta << nm.x[0], std::exp(nm.x[1]), nm.x[2];
  if (options.polish && nm.converged) theta = optim::newton_polish(neg_natural, theta);

  out.params = GevParams::unchecked(theta[0], theta[1], theta[2]);
  out.loglik = objective(theta[0], theta[1], theta[2]);
  if (!nm.converged || !std::isfinite(out.loglik)) {
    out.message = "simplex search did not converge";
    out.se.fill(std::numeric_limits<double>::quiet_NaN());
    return out;
  }

  const optim::Matrix info =
      optim::numeric_hessian(neg_natural, theta, optim::relative_steps(theta, options.hessian_step));
  if (!info.allFinite()) {
    out.message = "observed information could not be evaluated";
    out.se.fill(std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  Eigen::LLT<optim::Matrix> llt(info);
  if (llt.info() != Eigen::Success) {
    out.message = "observed information is not positive definite";
    out.se.fill(std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  out.vcov = llt.solve(optim::Matrix::Identity(3, 3));
  out.vcov = 0.5 * (out.vcov + out.vcov.transpose()).eval();
  for (int j = 0; j < 3; ++j) out.se[j] = std::sqrt(out.vcov(j, j));
  if (theta[2] <= -1.0) {
    out.message = "shape estimate at or below -1 (irregular likelihood)";
    return out;
  }
  out.converged = true;
  return out;
}

}  // namespace gevmiss
