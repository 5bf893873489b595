#include "gevmiss/philox.hpp"

namespace gevmiss {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint32_t stream_hi,
                       std::uint32_t stream_lo) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0, 0, stream_lo, stream_hi} {}

Philox4x32::Block Philox4x32::bijection(Block c, Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (used_ == 4) {
    buffer_ = bijection(counter_, key_);
    if (++counter_[0] == 0) ++counter_[1];
    used_ = 0;
  }
  return buffer_[used_++];
}

std::uint64_t Philox4x32::next_u64() noexcept {
  const std::uint64_t hi = (*this)();
  return (hi << 32) | (*this)();
}

double Philox4x32::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Philox4x32::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % bound;
}

Philox4x32 make_stream(std::uint64_t seed, std::uint64_t replicate, StreamPurpose purpose) {
  // Replicate in the low word, purpose and the replicate's high bits in the high word.
  const auto hi = (static_cast<std::uint32_t>(purpose) << 24) ^
                  static_cast<std::uint32_t>(replicate >> 32);
  return {seed, hi, static_cast<std::uint32_t>(replicate)};
}

}  // namespace gevmiss
