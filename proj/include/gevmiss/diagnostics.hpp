#pragma once

#include <vector>

#include "gevmiss/blocks.hpp"
#include "gevmiss/fit.hpp"

namespace gevmiss {

/// p_i = G(m_i) under the fitted model adjusted to block i's observation count.
[[nodiscard]] std::vector<double> model_probabilities(const BlockMaximaSet& data,
                                                      const FitResult& fit);

struct AdjustedMaxima {
  std::vector<double> values;
  /// Probability was clamped into [1e-12, 1 - 1e-12] before inversion.
  std::vector<bool> clamped;
};

/// Observed maxima mapped to full-block equivalents by matching quantiles.
[[nodiscard]] AdjustedMaxima adjusted_block_maxima(const BlockMaximaSet& data,
                                                   const FitResult& fit);

/// 2.5% and 97.5% quantiles of the i-th of b uniform order statistics.
struct OrderBand {
  double lo;
  double hi;
};
[[nodiscard]] OrderBand uniform_order_band(std::size_t i, std::size_t b, double level = 0.95);

struct PpPoint {
  double expected;
  double observed;
  double lo;
  double hi;
};
[[nodiscard]] std::vector<PpPoint> pp_plot_data(const BlockMaximaSet& data, const FitResult& fit);

struct QqPoint {
  double model_quantile;
  double adjusted_maximum;
  double lo;
  double hi;
};
[[nodiscard]] std::vector<QqPoint> qq_plot_data(const BlockMaximaSet& data, const FitResult& fit);

/// Abscissa of the return-level plot: -log10(-log(1 - 1/r)).
[[nodiscard]] double rl_plot_abscissa(double r);

struct RlCurvePoint {
  double r;
  double x_axis;
  double z;
  double lo;
  double hi;
  /// False when the profile interval failed or is open at this r.
  bool interval_ok;
};

struct RlEmpiricalPoint {
  double r;
  double x_axis;
  double z;
};

struct ReturnLevelPlot {
  std::vector<RlCurvePoint> curve;
  std::vector<RlEmpiricalPoint> empirical;
};

/// Log-spaced return periods from 1.1 to 1000.
[[nodiscard]] std::vector<double> default_rl_grid(std::size_t points = 40);

[[nodiscard]] ReturnLevelPlot return_level_plot_data(const BlockMaximaSet& data,
                                                     const FitResult& fit,
                                                     const std::vector<double>& r_grid,
                                                     double level = 0.95,
                                                     double discard_threshold = 0.10);

struct HistogramBin {
  double left;
  double right;
  double height;
};

struct DensityPlot {
  std::vector<HistogramBin> bins;
  std::vector<double> grid_z;
  std::vector<double> pdf;
};

/// Density-scaled histogram of the adjusted maxima and the fitted full-block
/// density on 512 points spanning the data range widened by 10% each side.
[[nodiscard]] DensityPlot density_plot_data(const BlockMaximaSet& data, const FitResult& fit,
                                            std::size_t n_bins);

/// Sturges' rule.
[[nodiscard]] std::size_t default_bin_count(std::size_t b);

struct DiagnosticsBundle {
  std::vector<PpPoint> pp;
  std::vector<QqPoint> qq;
  ReturnLevelPlot rl;
  DensityPlot density;
  AdjustedMaxima adjusted;
  GevParams density_params = GevParams::unchecked(0.0, 1.0, 0.0);
};

[[nodiscard]] DiagnosticsBundle diagnostics(const BlockMaximaSet& data, const FitResult& fit,
                                            const std::vector<double>& r_grid,
                                            std::size_t n_bins, double discard_threshold = 0.10);

}  // namespace gevmiss
