#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gevmiss/gev.hpp"

namespace gevmiss {

/// Observed maximum of one block together with its observation count.
/// `n_full` is carried per block so that 365/366-day years can be mixed.
struct BlockRecord {
  std::int64_t block_id = 0;
  double maximum = 0.0;
  std::int64_t n_obs = 0;
  std::int64_t n_full = 0;

  [[nodiscard]] MissingnessFraction fraction() const { return {n_obs, n_full}; }
  [[nodiscard]] double ratio() const {
    return static_cast<double>(n_obs) / static_cast<double>(n_full);
  }
  [[nodiscard]] double missing_fraction() const {
    return static_cast<double>(n_full - n_obs) / static_cast<double>(n_full);
  }

  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

/// Ordered block maxima. Construction validates every record.
class BlockMaximaSet {
 public:
  BlockMaximaSet() = default;
  explicit BlockMaximaSet(std::vector<BlockRecord> blocks);

  /// Convenience for the common case of a single block size.
  static BlockMaximaSet from_maxima(std::span<const double> maxima,
                                    std::span<const std::int64_t> n_obs, std::int64_t n_full);
  /// All blocks complete.
  static BlockMaximaSet complete(std::span<const double> maxima, std::int64_t n_full);

  [[nodiscard]] const std::vector<BlockRecord>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] std::size_t size() const noexcept { return blocks_.size(); }
  [[nodiscard]] bool empty() const noexcept { return blocks_.empty(); }
  [[nodiscard]] const BlockRecord& operator[](std::size_t i) const { return blocks_[i]; }
  [[nodiscard]] std::vector<double> maxima() const;
  [[nodiscard]] bool any_missing() const noexcept;

  /// Blocks whose missing fraction does not exceed `max_missing_fraction`.
  [[nodiscard]] BlockMaximaSet retain_by_missingness(double max_missing_fraction) const;
  /// Every maximum shifted by `c`.
  [[nodiscard]] BlockMaximaSet shifted(double c) const;

  friend bool operator==(const BlockMaximaSet&, const BlockMaximaSet&) = default;

 private:
  std::vector<BlockRecord> blocks_;
};

enum class Estimator { adjust, naive, discard, weight1, weight2, full };

[[nodiscard]] std::string_view to_string(Estimator e) noexcept;
/// Throws DomainError for unknown names.
[[nodiscard]] Estimator parse_estimator(std::string_view name);

}  // namespace gevmiss
