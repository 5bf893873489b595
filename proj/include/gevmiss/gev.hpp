#pragma once

// GEV distribution family and the block-size reparametrisation used to
// account for missing values in a block.

#include <cstdint>

namespace gevmiss {

/// Below this magnitude the shape parameter is evaluated with the Gumbel
/// (xi = 0) formulas.
inline constexpr double kGumbelShapeThreshold = 1e-8;

/// Location / scale / shape triple. Construction validates sigma > 0 and
/// finiteness; use `GevParams::unchecked` only on hot paths that have
/// already validated their inputs.
class GevParams {
 public:
  GevParams(double mu, double sigma, double xi);

  static GevParams unchecked(double mu, double sigma, double xi) noexcept {
    GevParams p;
    p.mu_ = mu;
    p.sigma_ = sigma;
    p.xi_ = xi;
    return p;
  }

  [[nodiscard]] double mu() const noexcept { return mu_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }
  [[nodiscard]] double xi() const noexcept { return xi_; }

  [[nodiscard]] static bool valid(double mu, double sigma, double xi) noexcept;

  friend bool operator==(const GevParams&, const GevParams&) = default;

 private:
  GevParams() = default;
  double mu_ = 0.0;
  double sigma_ = 1.0;
  double xi_ = 0.0;
};

/// Number of non-missing observations in a block out of the full block size.
/// Stored as integer counts so that the full-block case is detected exactly.
class MissingnessFraction {
 public:
  MissingnessFraction(std::int64_t n_obs, std::int64_t n_full);

  [[nodiscard]] std::int64_t n_obs() const noexcept { return n_obs_; }
  [[nodiscard]] std::int64_t n_full() const noexcept { return n_full_; }
  [[nodiscard]] bool complete() const noexcept { return n_obs_ == n_full_; }
  [[nodiscard]] double ratio() const noexcept {
    return static_cast<double>(n_obs_) / static_cast<double>(n_full_);
  }

 private:
  std::int64_t n_obs_;
  std::int64_t n_full_;
};

[[nodiscard]] double gev_cdf(double z, const GevParams& p);
[[nodiscard]] double gev_pdf(double z, const GevParams& p);
/// Returns -infinity at and beyond the support endpoints.
[[nodiscard]] double gev_log_pdf(double z, const GevParams& p);
/// Inverse of gev_cdf; throws DomainError unless 0 < prob < 1.
[[nodiscard]] double gev_quantile(double prob, const GevParams& p);

/// Parameters of G(.; p)^ratio, which is again GEV with the same shape.
[[nodiscard]] GevParams adjust_params(const GevParams& p, const MissingnessFraction& frac);
/// Same as above for a raw ratio in (0, 1]. Exactly the identity when ratio == 1.
[[nodiscard]] GevParams adjust_params(const GevParams& p, double ratio);

/// The level exceeded with probability 1/r in a single block; requires r > 1.
[[nodiscard]] double return_level(double r, const GevParams& p);

namespace detail {

// Unvalidated kernels shared by the likelihood code. They assume sigma > 0.

double log_pdf_raw(double z, double mu, double sigma, double xi) noexcept;
double cdf_raw(double z, double mu, double sigma, double xi) noexcept;
double quantile_raw(double prob, double mu, double sigma, double xi) noexcept;
/// (y^-xi - 1) / xi, the return-level offset in units of sigma for y = -log(1 - 1/r).
double rl_offset(double xi, double log_y) noexcept;
/// Derivative of rl_offset with respect to xi.
double rl_offset_dxi(double xi, double log_y) noexcept;
/// Location and scale of G^ratio given log(ratio) (ratio < 1).
void adjust_raw(double mu, double sigma, double xi, double log_ratio, double& mu_out,
                double& sigma_out) noexcept;

}  // namespace detail

}  // namespace gevmiss
