#include "gevmiss/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gevmiss/errors.hpp"

namespace gevmiss {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double loglik_adjusted(const BlockMaximaSet& data, const GevParams& p) {
  double total = 0.0;
  for (const auto& b : data.blocks()) {
    total += gev_log_pdf(b.maximum, adjust_params(p, b.fraction()));
    if (total == kNegInf) return kNegInf;
  }
  return total;
}

double loglik_unweighted(const BlockMaximaSet& data, const GevParams& p) {
  double total = 0.0;
  for (const auto& b : data.blocks()) {
    total += gev_log_pdf(b.maximum, p);
    if (total == kNegInf) return kNegInf;
  }
  return total;
}

std::vector<double> likelihood_weights(const BlockMaximaSet& data, WeightScheme scheme) {
  const auto& blocks = data.blocks();
  std::vector<double> w(blocks.size(), 1.0);
  if (scheme == WeightScheme::weight1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) w[i] = blocks[i].ratio();
    return w;
  }
  std::vector<double> sorted = data.maxima();
  std::sort(sorted.begin(), sorted.end());
  const double b = static_cast<double>(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto rank = std::upper_bound(sorted.begin(), sorted.end(), blocks[i].maximum) -
                      sorted.begin();
    const double ecdf = static_cast<double>(rank) / b;
    w[i] = std::pow(ecdf, static_cast<double>(blocks[i].n_full - blocks[i].n_obs));
  }
  return w;
}

double loglik_weighted(const BlockMaximaSet& data, const GevParams& p, WeightScheme scheme) {
  const auto w = likelihood_weights(data, scheme);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (w[i] == 0.0) continue;
    total += w[i] * gev_log_pdf(data[i].maximum, p);
    if (total == kNegInf) return kNegInf;
  }
  return total;
}

LogLikelihood::LogLikelihood(const BlockMaximaSet& data, Estimator estimator,
                             double discard_threshold)
    : estimator_(estimator),
      data_(estimator == Estimator::discard ? data.retain_by_missingness(discard_threshold)
                                            : data) {
  if (data_.size() < 2) {
    throw InsufficientDataError(
        "fitting needs at least 2 blocks, " + std::to_string(data_.size()) + " available" +
            (estimator == Estimator::discard ? " after discarding" : ""),
        data_.size());
  }
  maxima_ = data_.maxima();
  if (estimator == Estimator::adjust) {
    log_ratio_.reserve(data_.size());
    for (const auto& b : data_.blocks()) {
      log_ratio_.push_back(b.n_obs == b.n_full ? 0.0 : std::log(b.ratio()));
    }
  } else if (estimator == Estimator::weight1) {
    weight_ = likelihood_weights(data_, WeightScheme::weight1);
  } else if (estimator == Estimator::weight2) {
    weight_ = likelihood_weights(data_, WeightScheme::weight2);
  }
}

double LogLikelihood::operator()(double mu, double sigma, double xi) const noexcept {
  if (!GevParams::valid(mu, sigma, xi)) return kNegInf;
  double total = 0.0;
  if (!log_ratio_.empty()) {
    for (std::size_t i = 0; i < maxima_.size(); ++i) {
      double mu_i = mu;
      double sigma_i = sigma;
      if (log_ratio_[i] != 0.0) detail::adjust_raw(mu, sigma, xi, log_ratio_[i], mu_i, sigma_i);
      total += detail::log_pdf_raw(maxima_[i], mu_i, sigma_i, xi);
      if (total == kNegInf) return kNegInf;
    }
  } else if (!weight_.empty()) {
    for (std::size_t i = 0; i < maxima_.size(); ++i) {
      if (weight_[i] == 0.0) continue;
      total += weight_[i] * detail::log_pdf_raw(maxima_[i], mu, sigma, xi);
      if (total == kNegInf) return kNegInf;
    }
  } else {
    for (double m : maxima_) {
      total += detail::log_pdf_raw(m, mu, sigma, xi);
      if (total == kNegInf) return kNegInf;
    }
  }
  return std::isnan(total) ? kNegInf : total;
}

}  // namespace gevmiss
