#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gevmiss/blocks.hpp"
#include "gevmiss/philox.hpp"

namespace gevmiss {

enum class Distribution { exponential, gaussian, student_t2, beta_1_10, maxar1 };

[[nodiscard]] std::string_view to_string(Distribution d) noexcept;
[[nodiscard]] Distribution parse_distribution(std::string_view name);

struct RawDistribution {
  Distribution tag = Distribution::exponential;
  /// Extremal index of the maxAR(1) process, in (0, 1].
  double maxar_theta = 0.5;
};

/// `count` raw values. maxar1 values form one contiguous series on unit
/// exponential margins; the others are i.i.d. by inversion.
[[nodiscard]] std::vector<double> simulate_raw(const RawDistribution& dist, std::size_t count,
                                               Philox4x32& rng);

/// maxAR(1) on its unit Frechet scale: X_0, Z_i unit Frechet and
/// X_i = max{(1 - theta) X_{i-1}, theta Z_i}.
[[nodiscard]] std::vector<double> maxar1_frechet(double theta, std::size_t count,
                                                 Philox4x32& rng);

struct MaskedBlock {
  double maximum;
  std::int64_t n_obs;
};

/// Draws pi ~ U(0, miss_upper), removes round(pi * n) values chosen without
/// replacement and returns the maximum of the rest.
[[nodiscard]] MaskedBlock impose_missingness(std::span<const double> block, double miss_upper,
                                             Philox4x32& rng);

/// z solving F(z)^n = 1 - 1/r for the raw marginal F.
[[nodiscard]] double true_return_level(const RawDistribution& dist, std::int64_t n, double r);
/// True when true_return_level ignores serial dependence (maxar1).
[[nodiscard]] bool true_return_level_assumes_iid(const RawDistribution& dist) noexcept;

struct SimulationConfig {
  RawDistribution dist{};
  std::int64_t b = 50;
  std::int64_t n = 90;
  double miss_upper = 0.2;
  std::int64_t reps = 1000;
  std::uint64_t seed = 1;
  std::vector<Estimator> estimators{Estimator::adjust, Estimator::naive, Estimator::discard,
                                    Estimator::weight1, Estimator::weight2};
  double rl_period = 100.0;
  double ci_level = 0.95;
  double discard_threshold = 0.10;
  /// Estimators (full included) that get a profile interval for the return level.
  std::vector<Estimator> profile_intervals{Estimator::full, Estimator::adjust, Estimator::naive,
                                           Estimator::discard, Estimator::weight1,
                                           Estimator::weight2};

  /// Throws DomainError describing the first invalid field.
  void validate() const;
};

enum class ReplicateStatus { ok, nonconverged, insufficient_data };
[[nodiscard]] std::string_view to_string(ReplicateStatus s) noexcept;

struct ReplicateRecord {
  std::int64_t replicate = 0;
  Estimator estimator = Estimator::full;
  ReplicateStatus status = ReplicateStatus::ok;
  double mu = 0.0;
  double sigma = 0.0;
  double xi = 0.0;
  double rl = 0.0;
  /// NaN when no interval was requested or it failed.
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// -1 not evaluated, otherwise 0/1.
  int covered = -1;
  std::size_t n_blocks_used = 0;
  double mean_missing_fraction = 0.0;
};

enum class Statistic { bias, median_bias, sd, iqr, rmse, mae, coverage };
[[nodiscard]] std::string_view to_string(Statistic s) noexcept;

struct StatValue {
  double value = 0.0;
  double mcse = 0.0;
};

/// bias, median bias, sd, iqr, rmse and mae of a stream of errors.
struct ErrorSummary {
  std::size_t count = 0;
  StatValue bias;
  StatValue median_bias;
  StatValue sd;
  StatValue iqr;
  StatValue rmse;
  StatValue mae;
};

struct EstimatorSummary {
  Estimator estimator = Estimator::adjust;
  std::size_t failures = 0;
  /// Parameter differences against the full-data fit of the same replicate.
  ErrorSummary mu_diff;
  ErrorSummary sigma_diff;
  ErrorSummary xi_diff;
  /// Return-level errors against the true return level.
  ErrorSummary rl_error;
  /// Absent (count 0) when no intervals were computed.
  std::size_t coverage_count = 0;
  StatValue coverage;
};

struct SimulationSummary {
  SimulationConfig config;
  double true_rl = 0.0;
  bool true_rl_assumes_iid = false;
  double mean_missing_fraction = 0.0;
  std::vector<EstimatorSummary> estimators;
};

struct StudyResult {
  std::vector<ReplicateRecord> records;
  SimulationSummary summary;
};

/// Monte Carlo study. Replicates run on `threads` workers; the output does
/// not depend on the worker count.
[[nodiscard]] StudyResult run_study(const SimulationConfig& config, unsigned threads = 1);

/// Monte Carlo standard error of `stat` computed from per-replicate values
/// (errors, or 0/1 indicators for coverage). Median and iqr use a bootstrap
/// with `bootstrap_reps` resamples from a stream keyed by `seed`. Throws
/// InsufficientDataError below 30 values.
[[nodiscard]] double mcse(Statistic stat, std::span<const double> values,
                          std::uint64_t seed = 1, std::size_t bootstrap_reps = 1000);

/// Point value of `stat` for the same inputs.
[[nodiscard]] double statistic(Statistic stat, std::span<const double> values);

/// Type-7 sample quantile (linear interpolation between order statistics).
[[nodiscard]] double sample_quantile(std::vector<double> values, double p);

[[nodiscard]] ErrorSummary summarise_errors(std::span<const double> errors, std::uint64_t seed);

[[nodiscard]] SimulationSummary summarise(const SimulationConfig& config,
                                          const std::vector<ReplicateRecord>& records);

struct RlHistogram {
  Estimator estimator = Estimator::adjust;
  std::vector<double> edges;
  /// Fraction of estimates per bin; sums to one.
  std::vector<double> mass;
  double mean = 0.0;
  double median = 0.0;
  double true_rl = 0.0;
};

[[nodiscard]] RlHistogram rl_histogram_data(const std::vector<ReplicateRecord>& records,
                                            Estimator estimator, double true_rl,
                                            std::size_t n_bins = 50);

}  // namespace gevmiss
