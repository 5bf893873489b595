#include "gevmiss/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "gevmiss/errors.hpp"
#include "gevmiss/fit.hpp"
#include "gevmiss/profile.hpp"
#include "gevmiss/special.hpp"

namespace gevmiss {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinReplicates = 30;

double frechet(Philox4x32& rng) { return -1.0 / std::log(rng.uniform()); }

// Order-preserving map from unit Frechet to unit exponential margins.
double frechet_to_exponential(double x) { return -std::log(-std::expm1(-1.0 / x)); }

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  // Shifting by the first value makes a constant stream give exactly zero.
  const double shift = v.front();
  double m = 0.0;
  for (double x : v) m += x - shift;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - shift - m) * (x - shift - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool contains(const std::vector<Estimator>& set, Estimator e) {
  return std::find(set.begin(), set.end(), e) != set.end();
}

std::vector<ReplicateRecord> run_replicate(const SimulationConfig& cfg, std::int64_t rep,
                                           double true_rl) {
  const auto b = static_cast<std::size_t>(cfg.b);
  const auto n = static_cast<std::size_t>(cfg.n);
  auto data_rng = make_stream(cfg.seed, static_cast<std::uint64_t>(rep), StreamPurpose::data);
  auto miss_rng =
      make_stream(cfg.seed, static_cast<std::uint64_t>(rep), StreamPurpose::missingness);
  const auto raw = simulate_raw(cfg.dist, b * n, data_rng);

  std::vector<double> full_max(b);
  std::vector<double> obs_max(b);
  std::vector<std::int64_t> n_obs(b);
  double missing = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    const std::span<const double> block(raw.data() + k * n, n);
    full_max[k] = *std::max_element(block.begin(), block.end());
    const auto masked = impose_missingness(block, cfg.miss_upper, miss_rng);
    obs_max[k] = masked.maximum;
    n_obs[k] = masked.n_obs;
    missing += static_cast<double>(cfg.n - masked.n_obs) / static_cast<double>(cfg.n);
  }
  missing /= static_cast<double>(b);

  const auto full_data = BlockMaximaSet::complete(full_max, cfg.n);
  const auto observed = BlockMaximaSet::from_maxima(obs_max, n_obs, cfg.n);
  FitOptions opts;
  opts.discard_threshold = cfg.discard_threshold;

  std::vector<ReplicateRecord> out;
  const auto run_one = [&](const BlockMaximaSet& data, Estimator e) {
    ReplicateRecord rec;
    rec.replicate = rep;
    rec.estimator = e;
    rec.mean_missing_fraction = missing;
    rec.ci_lo = rec.ci_hi = kNaN;
    try {
      const LogLikelihood objective(data, e, cfg.discard_threshold);
      const auto f = fit(objective, opts);
      rec.n_blocks_used = f.n_blocks_used;
      rec.mu = f.params.mu();
      rec.sigma = f.params.sigma();
      rec.xi = f.params.xi();
      if (!f.converged) {
        rec.status = ReplicateStatus::nonconverged;
        rec.rl = kNaN;
        return rec;
      }
      rec.rl = return_level(cfg.rl_period, f.params);
      if (contains(cfg.profile_intervals, e)) {
        const auto ci = return_level_interval(objective, f, cfg.rl_period, cfg.ci_level);
        if (ci.ok) {
          rec.ci_lo = ci.lo;
          rec.ci_hi = ci.hi;
          rec.covered = (ci.lo <= true_rl && true_rl <= ci.hi) ? 1 : 0;
        }
      }
    } catch (const InsufficientDataError& err) {
      rec.status = ReplicateStatus::insufficient_data;
      rec.n_blocks_used = err.count();
      rec.mu = rec.sigma = rec.xi = rec.rl = kNaN;
    }
    return rec;
  };

  out.push_back(run_one(full_data, Estimator::full));
  for (Estimator e : cfg.estimators) {
    if (e == Estimator::full) continue;
    out.push_back(run_one(observed, e));
  }
  return out;
}

}  // namespace

std::string_view to_string(Distribution d) noexcept {
  switch (d) {
    case Distribution::exponential: return "exponential";
    case Distribution::gaussian: return "gaussian";
    case Distribution::student_t2: return "student_t2";
    case Distribution::beta_1_10: return "beta_1_10";
    case Distribution::maxar1: return "maxar1";
  }
  return "?";
}

Distribution parse_distribution(std::string_view name) {
  for (auto d : {Distribution::exponential, Distribution::gaussian, Distribution::student_t2,
                 Distribution::beta_1_10, Distribution::maxar1}) {
    if (name == to_string(d)) return d;
  }
  throw DomainError("unknown distribution '" + std::string(name) + "'");
}

std::vector<double> maxar1_frechet(double theta, std::size_t count, Philox4x32& rng) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("maxar_theta must lie in (0, 1]");
  std::vector<double> out(count);
  double prev = frechet(rng);
  for (auto& x : out) {
    prev = std::max((1.0 - theta) * prev, theta * frechet(rng));
    x = prev;
  }
  return out;
}

std::vector<double> simulate_raw(const RawDistribution& dist, std::size_t count,
                                 Philox4x32& rng) {
  if (dist.tag == Distribution::maxar1) {
    auto x = maxar1_frechet(dist.maxar_theta, count, rng);
    for (auto& v : x) v = frechet_to_exponential(v);
    return x;
  }
  std::vector<double> out(count);
  for (auto& v : out) {
    const double u = rng.uniform();
    switch (dist.tag) {
      case Distribution::exponential: v = -std::log(u); break;
      case Distribution::gaussian: v = special::normal_quantile(u); break;
      case Distribution::student_t2: v = (2.0 * u - 1.0) / std::sqrt(2.0 * u * (1.0 - u)); break;
      case Distribution::beta_1_10: v = -std::expm1(0.1 * std::log1p(-u)); break;
      case Distribution::maxar1: break;
    }
  }
  return out;
}

MaskedBlock impose_missingness(std::span<const double> block, double miss_upper,
                               Philox4x32& rng) {
  if (block.empty()) throw DomainError("block must be non-empty");
  if (!(miss_upper >= 0.0 && miss_upper < 1.0)) throw DomainError("miss_upper must lie in [0, 1)");
  const auto n = static_cast<std::int64_t>(block.size());
  const double pi = miss_upper * rng.uniform();
  auto removed = static_cast<std::int64_t>(std::round(pi * static_cast<double>(n)));
  removed = std::min(removed, n - 1);
  // Partial Fisher-Yates: the first `removed` slots of the permutation are dropped.
  std::vector<std::size_t> idx(block.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::int64_t k = 0; k < removed; ++k) {
    const auto j = static_cast<std::size_t>(k) +
                   static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[j]);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = static_cast<std::size_t>(removed); k < idx.size(); ++k) {
    best = std::max(best, block[idx[k]]);
  }
  return {best, n - removed};
}

double true_return_level(const RawDistribution& dist, std::int64_t n, double r) {
  if (n < 1) throw DomainError("block length must be positive");
  if (!(r > 1.0)) throw DomainError("return period must exceed 1");
  // p = (1 - 1/r)^(1/n) and q = 1 - p, both without cancellation.
  const double log_p = std::log1p(-1.0 / r) / static_cast<double>(n);
  const double p = std::exp(log_p);
  const double q = -std::expm1(log_p);
  switch (dist.tag) {
    case Distribution::exponential:
    case Distribution::maxar1: return -std::log(q);
    case Distribution::gaussian: return -special::normal_quantile(q);
    case Distribution::student_t2: return (1.0 - 2.0 * q) / std::sqrt(2.0 * p * q);
    case Distribution::beta_1_10: return -std::expm1(0.1 * std::log(q));
  }
  return kNaN;
}

bool true_return_level_assumes_iid(const RawDistribution& dist) noexcept {
  return dist.tag == Distribution::maxar1;
}

void SimulationConfig::validate() const {
  if (b < 2) throw DomainError("b must be at least 2");
  if (n < 1) throw DomainError("n must be positive");
  if (!(miss_upper >= 0.0 && miss_upper < 1.0)) throw DomainError("miss_upper must lie in [0, 1)");
  if (reps < 1) throw DomainError("reps must be positive");
  if (!(rl_period > 1.0) || !std::isfinite(rl_period)) throw DomainError("rl_period must exceed 1");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw DomainError("ci_level must lie in (0, 1)");
  if (!(discard_threshold >= 0.0 && discard_threshold <= 1.0)) {
    throw DomainError("discard_threshold must lie in [0, 1]");
  }
  if (dist.tag == Distribution::maxar1 && !(dist.maxar_theta > 0.0 && dist.maxar_theta <= 1.0)) {
    throw DomainError("maxar_theta must lie in (0, 1]");
  }
  if (estimators.empty()) throw DomainError("at least one estimator is required");
}

std::string_view to_string(ReplicateStatus s) noexcept {
  switch (s) {
    case ReplicateStatus::ok: return "ok";
    case ReplicateStatus::nonconverged: return "nonconverged";
    case ReplicateStatus::insufficient_data: return "insufficient_data";
  }
  return "?";
}

std::string_view to_string(Statistic s) noexcept {
  switch (s) {
    case Statistic::bias: return "bias";
    case Statistic::median_bias: return "median_bias";
    case Statistic::sd: return "sd";
    case Statistic::iqr: return "iqr";
    case Statistic::rmse: return "rmse";
    case Statistic::mae: return "mae";
    case Statistic::coverage: return "coverage";
  }
  return "?";
}

double sample_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InsufficientDataError("quantile of an empty sample", 0);
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double statistic(Statistic stat, std::span<const double> values) {
  if (values.empty()) throw InsufficientDataError("statistic of an empty sample", 0);
  const std::vector<double> v(values.begin(), values.end());
  switch (stat) {
    case Statistic::bias:
    case Statistic::coverage: return mean_of(v);
    case Statistic::median_bias: return sample_quantile(v, 0.5);
    case Statistic::sd: return sd_of(v);
    case Statistic::iqr: return sample_quantile(v, 0.75) - sample_quantile(v, 0.25);
    case Statistic::rmse: {
      double ss = 0.0;
      for (double x : v) ss += x * x;
      return std::sqrt(ss / static_cast<double>(v.size()));
    }
    case Statistic::mae: {
      double s = 0.0;
      for (double x : v) s += std::abs(x);
      return s / static_cast<double>(v.size());
    }
  }
  return kNaN;
}

double mcse(Statistic stat, std::span<const double> values, std::uint64_t seed,
            std::size_t bootstrap_reps) {
  if (values.size() < kMinReplicates) {
    throw InsufficientDataError("Monte Carlo standard errors need at least 30 replicates",
                                values.size());
  }
  const auto r = static_cast<double>(values.size());
  switch (stat) {
    case Statistic::bias: return sd_of(values) / std::sqrt(r);
    case Statistic::sd: return sd_of(values) / std::sqrt(2.0 * (r - 1.0));
    case Statistic::coverage: {
      const double p = mean_of(values);
      return std::sqrt(std::max(0.0, p * (1.0 - p)) / r);
    }
    case Statistic::mae: {
      std::vector<double> a(values.size());
      std::transform(values.begin(), values.end(), a.begin(), [](double x) { return std::abs(x); });
      return sd_of(a) / std::sqrt(r);
    }
    case Statistic::rmse: {
      const double rmse = statistic(Statistic::rmse, values);
      if (rmse == 0.0) return 0.0;
      std::vector<double> sq(values.size());
      std::transform(values.begin(), values.end(), sq.begin(), [](double x) { return x * x; });
      return sd_of(sq) / std::sqrt(r) / (2.0 * rmse);
    }
    case Statistic::median_bias:
    case Statistic::iqr: {
      auto rng = make_stream(seed, 0, StreamPurpose::bootstrap);
      std::vector<double> resample(values.size());
      std::vector<double> stats(bootstrap_reps);
      for (auto& s : stats) {
        for (auto& x : resample) x = values[rng.below(values.size())];
        s = statistic(stat, resample);
      }
      return sd_of(stats);
    }
  }
  return kNaN;
}

ErrorSummary summarise_errors(std::span<const double> errors, std::uint64_t seed) {
  ErrorSummary out;
  out.count = errors.size();
  if (errors.empty()) {
    for (auto* s : {&out.bias, &out.median_bias, &out.sd, &out.iqr, &out.rmse, &out.mae}) {
      *s = {kNaN, kNaN};
    }
    return out;
  }
  const auto fill = [&](Statistic stat, StatValue& target) {
    target.value = statistic(stat, errors);
    target.mcse = errors.size() >= kMinReplicates ? mcse(stat, errors, seed) : kNaN;
  };
  fill(Statistic::bias, out.bias);
  fill(Statistic::median_bias, out.median_bias);
  fill(Statistic::sd, out.sd);
  fill(Statistic::iqr, out.iqr);
  fill(Statistic::rmse, out.rmse);
  fill(Statistic::mae, out.mae);
  return out;
}

SimulationSummary summarise(const SimulationConfig& config,
                            const std::vector<ReplicateRecord>& records) {
  SimulationSummary out;
  out.config = config;
  out.true_rl = true_return_level(config.dist, config.n, config.rl_period);
  out.true_rl_assumes_iid = true_return_level_assumes_iid(config.dist);

  // Index full-data fits by replicate for the paired differences.
  std::vector<const ReplicateRecord*> full(static_cast<std::size_t>(config.reps), nullptr);
  double missing = 0.0;
  std::size_t n_full = 0;
  for (const auto& rec : records) {
    if (rec.estimator != Estimator::full) continue;
    full[static_cast<std::size_t>(rec.replicate)] = &rec;
    missing += rec.mean_missing_fraction;
    ++n_full;
  }
  out.mean_missing_fraction = n_full > 0 ? missing / static_cast<double>(n_full) : kNaN;

  std::vector<Estimator> order{Estimator::full};
  for (Estimator e : config.estimators) {
    if (e != Estimator::full) order.push_back(e);
  }
  for (Estimator e : order) {
    EstimatorSummary s;
    s.estimator = e;
    std::vector<double> dmu, dsigma, dxi, rl_err, covered;
    for (const auto& rec : records) {
      if (rec.estimator != e) continue;
      if (rec.status != ReplicateStatus::ok) {
        ++s.failures;
        continue;
      }
      rl_err.push_back(rec.rl - out.true_rl);
      if (rec.covered >= 0) covered.push_back(static_cast<double>(rec.covered));
      const auto* f = full[static_cast<std::size_t>(rec.replicate)];
      if (e != Estimator::full && f != nullptr && f->status == ReplicateStatus::ok) {
        dmu.push_back(rec.mu - f->mu);
        dsigma.push_back(rec.sigma - f->sigma);
        dxi.push_back(rec.xi - f->xi);
      }
    }
    s.mu_diff = summarise_errors(dmu, config.seed);
    s.sigma_diff = summarise_errors(dsigma, config.seed);
    s.xi_diff = summarise_errors(dxi, config.seed);
    s.rl_error = summarise_errors(rl_err, config.seed);
    s.coverage_count = covered.size();
    if (!covered.empty()) {
      s.coverage.value = statistic(Statistic::coverage, covered);
      s.coverage.mcse =
          covered.size() >= kMinReplicates ? mcse(Statistic::coverage, covered) : kNaN;
    } else {
      s.coverage = {kNaN, kNaN};
    }
    out.estimators.push_back(std::move(s));
  }
  return out;
}

StudyResult run_study(const SimulationConfig& config, unsigned threads) {
  config.validate();
  const double true_rl = true_return_level(config.dist, config.n, config.rl_period);
  const auto reps = static_cast<std::size_t>(config.reps);
  std::vector<std::vector<ReplicateRecord>> per_rep(reps);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t rep = next++; rep < reps; rep = next++) {
      try {
        per_rep[rep] = run_replicate(config, static_cast<std::int64_t>(rep), true_rl);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = reps;
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  StudyResult out;
  for (auto& rows : per_rep) {
    for (auto& r : rows) out.records.push_back(r);
  }
  out.summary = summarise(config, out.records);
  return out;
}

RlHistogram rl_histogram_data(const std::vector<ReplicateRecord>& records, Estimator estimator,
                              double true_rl, std::size_t n_bins) {
  if (n_bins == 0) throw DomainError("histogram needs at least one bin");
  std::vector<double> v;
  for (const auto& rec : records) {
    if (rec.estimator == estimator && rec.status == ReplicateStatus::ok) v.push_back(rec.rl);
  }
  if (v.empty()) throw InsufficientDataError("no successful return-level estimates", 0);
  RlHistogram out;
  out.estimator = estimator;
  out.true_rl = true_rl;
  out.mean = mean_of(v);
  out.median = sample_quantile(v, 0.5);
  const auto [min_it, max_it] = std::minmax_element(v.begin(), v.end());
  double lo = *min_it;
  double hi = *max_it;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  out.edges.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k) out.edges[k] = lo + width * static_cast<double>(k);
  out.edges.back() = hi;
  out.mass.assign(n_bins, 0.0);
  for (double x : v) {
    const auto k = std::min(static_cast<std::size_t>((x - lo) / width), n_bins - 1);
    out.mass[k] += 1.0;
  }
  for (auto& m : out.mass) m /= static_cast<double>(v.size());
  return out;
}

}  // namespace gevmiss
