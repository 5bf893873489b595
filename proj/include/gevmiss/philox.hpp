#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gevmiss {

/// Philox4x32-10 counter-based generator. A stream is identified by its key
/// and the upper two counter words; the lower two words count blocks.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint32_t stream_hi, std::uint32_t stream_lo) noexcept;

  /// The bare ten-round bijection.
  static Block bijection(Block counter, Key key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int used_ = 4;
};

enum class StreamPurpose : std::uint32_t { data = 1, missingness = 2, bootstrap = 3 };

/// Independent stream for one replicate and purpose.
[[nodiscard]] Philox4x32 make_stream(std::uint64_t seed, std::uint64_t replicate,
                                     StreamPurpose purpose);

}  // namespace gevmiss
