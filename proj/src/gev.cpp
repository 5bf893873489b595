#include "gevmiss/gev.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gevmiss/errors.hpp"

namespace gevmiss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_gumbel(double xi) { return std::abs(xi) < kGumbelShapeThreshold; }

void require_valid(const GevParams& p) {
  if (!GevParams::valid(p.mu(), p.sigma(), p.xi())) {
    throw DomainError("GEV parameters must be finite with sigma > 0");
  }
}

}  // namespace

GevParams::GevParams(double mu, double sigma, double xi) : mu_(mu), sigma_(sigma), xi_(xi) {
  if (!valid(mu, sigma, xi)) {
    throw DomainError("GEV parameters must be finite with sigma > 0 (got mu=" +
                      std::to_string(mu) + ", sigma=" + std::to_string(sigma) +
                      ", xi=" + std::to_string(xi) + ")");
  }
}

bool GevParams::valid(double mu, double sigma, double xi) noexcept {
  return std::isfinite(mu) && std::isfinite(sigma) && std::isfinite(xi) && sigma > 0.0;
}

MissingnessFraction::MissingnessFraction(std::int64_t n_obs, std::int64_t n_full)
    : n_obs_(n_obs), n_full_(n_full) {
  if (n_obs < 1 || n_obs > n_full) {
    throw DomainError("missingness fraction requires 1 <= n_obs <= n_full (got " +
                      std::to_string(n_obs) + "/" + std::to_string(n_full) + ")");
  }
}

namespace detail {

double cdf_raw(double z, double mu, double sigma, double xi) noexcept {
  const double w = (z - mu) / sigma;
  if (is_gumbel(xi)) return std::exp(-std::exp(-w));
  const double t = xi * w;
  if (t <= -1.0) return xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(t) / xi));
}

double log_pdf_raw(double z, double mu, double sigma, double xi) noexcept {
  const double w = (z - mu) / sigma;
  if (is_gumbel(xi)) return -std::log(sigma) - w - std::exp(-w);
  const double t = xi * w;
  if (t <= -1.0) return -kInf;
  const double l = std::log1p(t) / xi;  // -log of the tail term
  return -std::log(sigma) - (xi + 1.0) * l - std::exp(-l);
}

double quantile_raw(double prob, double mu, double sigma, double xi) noexcept {
  const double log_y = std::log(-std::log(prob));
  return mu + sigma * rl_offset(xi, log_y);
}

double rl_offset(double xi, double log_y) noexcept {
  if (is_gumbel(xi)) return -log_y;
  return std::expm1(-xi * log_y) / xi;
}

double rl_offset_dxi(double xi, double log_y) noexcept {
  const double u = xi * log_y;
  if (std::abs(u) < 0.1) {
    // sum_{k>=2} (-L)^k (k-1) xi^(k-2) / k!
    double term = log_y * log_y / 2.0;  // k = 2
    double sum = term;
    for (int k = 3; k <= 14; ++k) {
      // ratio of successive (-L)^k xi^(k-2) / k! terms, then (k-1) weighting.
      term *= -u / k;
      sum += term * (k - 1);
    }
    return sum;
  }
  const double e = std::exp(-u);
  return (-log_y * e * xi - std::expm1(-u)) / (xi * xi);
}

void adjust_raw(double mu, double sigma, double xi, double log_ratio, double& mu_out,
                double& sigma_out) noexcept {
  if (is_gumbel(xi)) {
    mu_out = mu + sigma * log_ratio;
    sigma_out = sigma;
    return;
  }
  const double u = xi * log_ratio;
  mu_out = mu + sigma * std::expm1(u) / xi;
  sigma_out = sigma * std::exp(u);
}

}  // namespace detail

double gev_cdf(double z, const GevParams& p) {
  require_valid(p);
  return detail::cdf_raw(z, p.mu(), p.sigma(), p.xi());
}

double gev_log_pdf(double z, const GevParams& p) {
  require_valid(p);
  return detail::log_pdf_raw(z, p.mu(), p.sigma(), p.xi());
}

double gev_pdf(double z, const GevParams& p) {
  const double lp = gev_log_pdf(z, p);
  return lp == -kInf ? 0.0 : std::exp(lp);
}

double gev_quantile(double prob, const GevParams& p) {
  require_valid(p);
  if (!(prob > 0.0 && prob < 1.0)) {
    throw DomainError("quantile probability must lie in (0, 1)");
  }
  return detail::quantile_raw(prob, p.mu(), p.sigma(), p.xi());
}

GevParams adjust_params(const GevParams& p, double ratio) {
  require_valid(p);
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw DomainError("block ratio must lie in (0, 1]");
  }
  if (ratio == 1.0) return p;
  double mu = 0.0;
  double sigma = 0.0;
  detail::adjust_raw(p.mu(), p.sigma(), p.xi(), std::log(ratio), mu, sigma);
  return GevParams::unchecked(mu, sigma, p.xi());
}

GevParams adjust_params(const GevParams& p, const MissingnessFraction& frac) {
  if (frac.complete()) {
    require_valid(p);
    return p;
  }
  return adjust_params(p, frac.ratio());
}

double return_level(double r, const GevParams& p) {
  if (!(r > 1.0) || !std::isfinite(r)) throw DomainError("return period must be finite and > 1");
  require_valid(p);
  const double log_y = std::log(-std::log1p(-1.0 / r));
  return p.mu() + p.sigma() * detail::rl_offset(p.xi(), log_y);
}

}  // namespace gevmiss
