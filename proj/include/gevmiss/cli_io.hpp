#pragma once

// Input parsing, block extraction and the CSV/JSON file formats used by the
// command-line tool.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gevmiss/blocks.hpp"
#include "gevmiss/diagnostics.hpp"
#include "gevmiss/fit.hpp"
#include "gevmiss/influence.hpp"
#include "gevmiss/profile.hpp"
#include "gevmiss/simulation.hpp"

namespace gevmiss {

/// Daily series with missing values. Dates are consecutive days: gaps in
/// the input are filled with missing entries.
struct RawSeries {
  std::vector<std::chrono::sys_days> dates;
  std::vector<std::optional<double>> values;

  [[nodiscard]] std::size_t size() const noexcept { return dates.size(); }
  [[nodiscard]] std::size_t missing_count() const noexcept;
};

/// Reads CSV with header `date,value`. Dates are YYYY-MM-DD in increasing
/// order; `NA` or an empty field marks a missing value. Throws ParseError.
[[nodiscard]] RawSeries parse_series(std::istream& in);
[[nodiscard]] RawSeries read_series(const std::filesystem::path& path);

[[nodiscard]] std::chrono::sys_days parse_iso_date(std::string_view text);

enum class BlockScheme { calendar_year, fixed_length };
[[nodiscard]] std::string_view to_string(BlockScheme s) noexcept;
[[nodiscard]] BlockScheme parse_block_scheme(std::string_view name);

struct BlockSpec {
  BlockScheme scheme = BlockScheme::calendar_year;
  /// Days per block for fixed_length.
  std::int64_t length = 365;
  /// Blocks with fewer non-missing values are dropped.
  std::int64_t min_obs = 1;

  void validate() const;
};

struct BlockExtraction {
  BlockMaximaSet blocks;
  /// Ids of the blocks dropped for having fewer than min_obs values.
  std::vector<std::int64_t> dropped;
};

/// Calendar-year blocks are identified by the year and have 365 or 366
/// days; fixed-length blocks are numbered from 1 starting at the first
/// date. Days of a block outside the series span count as missing.
/// Throws InsufficientDataError when no block survives.
[[nodiscard]] BlockExtraction extract_block_maxima(const RawSeries& series,
                                                   const BlockSpec& spec);

struct MissingnessReport {
  /// 1 - sum(n_obs) / sum(n_full) over the retained blocks.
  double total_missing_fraction = 0.0;
  std::vector<std::int64_t> block_id;
  std::vector<double> missing_fraction;
  std::vector<std::int64_t> dropped;
};

[[nodiscard]] MissingnessReport missingness_report(const BlockExtraction& extraction);

/// Locale-independent text with 17 significant digits (%.17g). NaN is
/// written as NA and infinities as inf / -inf.
[[nodiscard]] std::string format_number(double v);
/// Inverse of format_number; accepts NA for NaN.
[[nodiscard]] double parse_number(std::string_view text);

/// `block_id,maximum,n_obs,n_full`.
void write_blocks_csv(std::ostream& out, const BlockMaximaSet& blocks);
[[nodiscard]] BlockMaximaSet parse_blocks_csv(std::istream& in);
[[nodiscard]] BlockMaximaSet read_blocks_csv(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json missingness_to_json(const MissingnessReport& report);

[[nodiscard]] nlohmann::json fit_to_json(const FitResult& fit);

/// `period,point,lo,hi,method`.
void write_return_levels_csv(std::ostream& out, const std::vector<ReturnLevelEstimate>& rows);

void write_pp_csv(std::ostream& out, const std::vector<PpPoint>& points);
void write_qq_csv(std::ostream& out, const std::vector<QqPoint>& points);
void write_rl_plot_csv(std::ostream& out, const ReturnLevelPlot& plot);
void write_density_csv(std::ostream& out, const DensityPlot& plot);

/// `z_normal,inf_mu,inf_sigma,inf_xi,inf_rl<period>...`.
void write_influence_csv(std::ostream& out, const InfluenceCurve& curve);

/// Column label for a return period: integers print without a fraction.
[[nodiscard]] std::string period_label(double r);

/// Every key is optional and defaults to SimulationConfig{}; unknown keys
/// and wrong types throw ParseError.
[[nodiscard]] SimulationConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const SimulationConfig& config);
[[nodiscard]] SimulationConfig read_config(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json summary_to_json(const SimulationSummary& summary);
void write_replicates_csv(std::ostream& out, const std::vector<ReplicateRecord>& records);

/// Comma-separated list of reals, e.g. "25,50,100".
[[nodiscard]] std::vector<double> parse_real_list(std::string_view text);
/// "lo:hi:count" evenly spaced grid including both ends.
[[nodiscard]] std::vector<double> parse_grid(std::string_view text);

/// Machine-readable error object for an exception.
[[nodiscard]] nlohmann::json error_to_json(const std::exception& e);

}  // namespace gevmiss
