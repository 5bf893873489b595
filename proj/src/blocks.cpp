#include "gevmiss/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gevmiss/errors.hpp"

namespace gevmiss {

BlockMaximaSet::BlockMaximaSet(std::vector<BlockRecord> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (!std::isfinite(b.maximum)) {
      throw DomainError("block " + std::to_string(b.block_id) + ": maximum must be finite");
    }
    if (b.n_obs < 1 || b.n_obs > b.n_full) {
      throw DomainError("block " + std::to_string(b.block_id) +
                        ": requires 1 <= n_obs <= n_full");
    }
  }
}

BlockMaximaSet BlockMaximaSet::from_maxima(std::span<const double> maxima,
                                           std::span<const std::int64_t> n_obs,
                                           std::int64_t n_full) {
  if (maxima.size() != n_obs.size()) {
    throw DomainError("maxima and n_obs must have the same length");
  }
  std::vector<BlockRecord> blocks;
  blocks.reserve(maxima.size());
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    blocks.push_back({static_cast<std::int64_t>(i + 1), maxima[i], n_obs[i], n_full});
  }
  return BlockMaximaSet(std::move(blocks));
}

BlockMaximaSet BlockMaximaSet::complete(std::span<const double> maxima, std::int64_t n_full) {
  std::vector<std::int64_t> n_obs(maxima.size(), n_full);
  return from_maxima(maxima, n_obs, n_full);
}

std::vector<double> BlockMaximaSet::maxima() const {
  std::vector<double> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.maximum);
  return out;
}

bool BlockMaximaSet::any_missing() const noexcept {
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [](const BlockRecord& b) { return b.n_obs != b.n_full; });
}

BlockMaximaSet BlockMaximaSet::retain_by_missingness(double max_missing_fraction) const {
  std::vector<BlockRecord> kept;
  for (const auto& b : blocks_) {
    if (b.missing_fraction() <= max_missing_fraction) kept.push_back(b);
  }
  return BlockMaximaSet(std::move(kept));
}

BlockMaximaSet BlockMaximaSet::shifted(double c) const {
  auto copy = blocks_;
  for (auto& b : copy) b.maximum += c;
  return BlockMaximaSet(std::move(copy));
}

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::adjust: return "adjust";
    case Estimator::naive: return "naive";
    case Estimator::discard: return "discard";
    case Estimator::weight1: return "weight1";
    case Estimator::weight2: return "weight2";
    case Estimator::full: return "full";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  for (auto e : {Estimator::adjust, Estimator::naive, Estimator::discard, Estimator::weight1,
                 Estimator::weight2, Estimator::full}) {
    if (to_string(e) == name) return e;
  }
  throw DomainError("unknown estimator '" + std::string(name) + "'");
}

}  // namespace gevmiss
