#include "gevmiss/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gevmiss/errors.hpp"
#include "gevmiss/profile.hpp"
#include "gevmiss/special.hpp"

namespace gevmiss {

namespace {

constexpr double kClamp = 1e-12;
constexpr std::size_t kDensityGrid = 512;

void require_converged(const FitResult& fit) {
  if (!fit.converged) throw DomainError("diagnostics need a converged fit");
}

double plotting_position(std::size_t i, std::size_t b) {
  return static_cast<double>(i) / static_cast<double>(b + 1);
}

}  // namespace

std::vector<double> model_probabilities(const BlockMaximaSet& data, const FitResult& fit) {
  require_converged(fit);
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& b : data.blocks()) {
    out.push_back(gev_cdf(b.maximum, adjust_params(fit.params, b.ratio())));
  }
  return out;
}

AdjustedMaxima adjusted_block_maxima(const BlockMaximaSet& data, const FitResult& fit) {
  const auto probs = model_probabilities(data, fit);
  AdjustedMaxima out;
  out.values.reserve(probs.size());
  out.clamped.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (data[i].n_obs == data[i].n_full) {
      out.values.push_back(data[i].maximum);
      out.clamped.push_back(false);
      continue;
    }
    const double p = std::clamp(probs[i], kClamp, 1.0 - kClamp);
    out.clamped.push_back(p != probs[i]);
    out.values.push_back(gev_quantile(p, fit.params));
  }
  return out;
}

OrderBand uniform_order_band(std::size_t i, std::size_t b, double level) {
  if (i < 1 || i > b) throw DomainError("order statistic index out of range");
  const double a = static_cast<double>(i);
  const double c = static_cast<double>(b + 1 - i);
  const double tail = 0.5 * (1.0 - level);
  return {special::beta_quantile(a, c, tail), special::beta_quantile(a, c, 1.0 - tail)};
}

std::vector<PpPoint> pp_plot_data(const BlockMaximaSet& data, const FitResult& fit) {
  auto probs = model_probabilities(data, fit);
  std::sort(probs.begin(), probs.end());
  const std::size_t b = probs.size();
  std::vector<PpPoint> out;
  out.reserve(b);
  for (std::size_t i = 1; i <= b; ++i) {
    const auto band = uniform_order_band(i, b);
    out.push_back({plotting_position(i, b), probs[i - 1], band.lo, band.hi});
  }
  return out;
}

std::vector<QqPoint> qq_plot_data(const BlockMaximaSet& data, const FitResult& fit) {
  auto adj = adjusted_block_maxima(data, fit).values;
  std::sort(adj.begin(), adj.end());
  const std::size_t b = adj.size();
  std::vector<QqPoint> out;
  out.reserve(b);
  for (std::size_t i = 1; i <= b; ++i) {
    const auto band = uniform_order_band(i, b);
    out.push_back({gev_quantile(plotting_position(i, b), fit.params), adj[i - 1],
                   gev_quantile(band.lo, fit.params), gev_quantile(band.hi, fit.params)});
  }
  return out;
}

double rl_plot_abscissa(double r) {
  if (!(r > 1.0)) throw DomainError("return period must exceed 1");
  return -std::log10(-std::log1p(-1.0 / r));
}

std::vector<double> default_rl_grid(std::size_t points) {
  if (points < 2) throw DomainError("return-level grid needs at least two points");
  std::vector<double> out(points);
  const double lo = std::log(1.1);
  const double hi = std::log(1000.0);
  for (std::size_t k = 0; k < points; ++k) {
    out[k] = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  return out;
}

ReturnLevelPlot return_level_plot_data(const BlockMaximaSet& data, const FitResult& fit,
                                       const std::vector<double>& r_grid, double level,
                                       double discard_threshold) {
  require_converged(fit);
  ReturnLevelPlot out;
  const LogLikelihood objective(data, fit.estimator, discard_threshold);
  for (double r : r_grid) {
    const auto est = return_level_interval(objective, fit, r, level, IntervalMethod::profile);
    const bool ok = est.ok && !est.lower_open && !est.upper_open;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.curve.push_back({r, rl_plot_abscissa(r), est.point, ok ? est.lo : nan, ok ? est.hi : nan,
                         ok});
  }
  auto adj = adjusted_block_maxima(data, fit).values;
  std::sort(adj.begin(), adj.end());
  const std::size_t b = adj.size();
  for (std::size_t i = 1; i <= b; ++i) {
    const double r = 1.0 / (1.0 - plotting_position(i, b));
    out.empirical.push_back({r, rl_plot_abscissa(r), adj[i - 1]});
  }
  return out;
}

std::size_t default_bin_count(std::size_t b) {
  if (b == 0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(b)))) + 1;
}

DensityPlot density_plot_data(const BlockMaximaSet& data, const FitResult& fit,
                              std::size_t n_bins) {
  if (n_bins == 0) throw DomainError("histogram needs at least one bin");
  const auto adj = adjusted_block_maxima(data, fit).values;
  if (adj.empty()) throw InsufficientDataError("no block maxima", 0);
  const auto [min_it, max_it] = std::minmax_element(adj.begin(), adj.end());
  double lo = *min_it;
  double hi = *max_it;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  for (double v : adj) {
    auto k = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(k, n_bins - 1)] += 1;
  }
  DensityPlot out;
  const double total = static_cast<double>(adj.size());
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double left = lo + width * static_cast<double>(k);
    const double right = k + 1 == n_bins ? hi : lo + width * static_cast<double>(k + 1);
    out.bins.push_back({left, right, static_cast<double>(counts[k]) / (total * width)});
  }
  const double pad = 0.1 * (hi - lo);
  const double g_lo = lo - pad;
  const double g_hi = hi + pad;
  out.grid_z.resize(kDensityGrid);
  out.pdf.resize(kDensityGrid);
  for (std::size_t k = 0; k < kDensityGrid; ++k) {
    const double z =
        g_lo + (g_hi - g_lo) * static_cast<double>(k) / static_cast<double>(kDensityGrid - 1);
    out.grid_z[k] = z;
    out.pdf[k] = gev_pdf(z, fit.params);
  }
  return out;
}

DiagnosticsBundle diagnostics(const BlockMaximaSet& data, const FitResult& fit,
                              const std::vector<double>& r_grid, std::size_t n_bins,
                              double discard_threshold) {
  DiagnosticsBundle out;
  out.pp = pp_plot_data(data, fit);
  out.qq = qq_plot_data(data, fit);
  out.rl = return_level_plot_data(data, fit, r_grid, 0.95, discard_threshold);
  out.density = density_plot_data(data, fit, n_bins);
  out.adjusted = adjusted_block_maxima(data, fit);
  out.density_params = fit.params;
  return out;
}

}  // namespace gevmiss
