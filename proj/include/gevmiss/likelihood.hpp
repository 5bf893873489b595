#pragma once

#include <vector>

#include "gevmiss/blocks.hpp"
#include "gevmiss/gev.hpp"

namespace gevmiss {

enum class WeightScheme { weight1, weight2 };

/// Log-likelihood of the missingness-adjusted model: block i contributes
/// log g(m_i; adjust_params(p, n_i / n_full_i)). -inf if any maximum lies
/// outside its block's support.
[[nodiscard]] double loglik_adjusted(const BlockMaximaSet& data, const GevParams& p);

/// Plain GEV log-likelihood ignoring the observation counts.
[[nodiscard]] double loglik_unweighted(const BlockMaximaSet& data, const GevParams& p);

/// Per-block weights: n_i / n (weight1) or Fhat(m_i)^(n - n_i) (weight2),
/// with Fhat(m) = #{j : m_j <= m} / b.
[[nodiscard]] std::vector<double> likelihood_weights(const BlockMaximaSet& data,
                                                     WeightScheme scheme);

[[nodiscard]] double loglik_weighted(const BlockMaximaSet& data, const GevParams& p,
                                     WeightScheme scheme);

/// Log-likelihood objective for one estimator, with all per-block constants
/// (log ratios, weights, discarded blocks) computed once at construction.
/// Evaluation takes raw parameters and returns -inf for sigma <= 0,
/// non-finite input or data outside the support.
class LogLikelihood {
 public:
  /// `discard_threshold` is the largest tolerated missing fraction for
  /// Estimator::discard; ignored by the other estimators. Throws
  /// InsufficientDataError when fewer than two blocks remain.
  LogLikelihood(const BlockMaximaSet& data, Estimator estimator, double discard_threshold = 0.10);

  [[nodiscard]] double operator()(double mu, double sigma, double xi) const noexcept;
  [[nodiscard]] double operator()(const GevParams& p) const noexcept {
    return (*this)(p.mu(), p.sigma(), p.xi());
  }

  [[nodiscard]] Estimator estimator() const noexcept { return estimator_; }
  /// Blocks entering the objective (after discarding).
  [[nodiscard]] const BlockMaximaSet& data() const noexcept { return data_; }
  [[nodiscard]] std::size_t blocks_used() const noexcept { return data_.size(); }

 private:
  Estimator estimator_;
  BlockMaximaSet data_;
  std::vector<double> maxima_;
  std::vector<double> log_ratio_;  // adjust only; 0 for complete blocks
  std::vector<double> weight_;     // weighted schemes only
};

}  // namespace gevmiss
