#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fmtstar {

namespace detail {
/// One Philox4x32-10 block; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);
}  // namespace detail

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key is the user seed; the 128-bit counter is split into a 64-bit
/// stream id (high half) and a 64-bit block index (low half). Distinct
/// (seed, stream) pairs give independent, reproducible sequences, so trials in
/// a sweep can be generated on any thread in any order. Output is identical on
/// every platform: no std distributions are involved.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  /// Independent generator on sub-stream `stream` of the same seed.
  Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound) by rejection (unbiased).
  std::uint64_t below(std::uint64_t bound);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> out_{};
  int used_ = 4;  // 32-bit words consumed from out_
};

/// Named sub-streams used by the library; fixed so results are reproducible.
namespace streams {
inline constexpr std::uint64_t kFreeSamples = 0;
inline constexpr std::uint64_t kGoalSamples = 1;
inline constexpr std::uint64_t kRrt = 2;
inline constexpr std::uint64_t kSmoothing = 3;
inline constexpr std::uint64_t kEnvironment = 4;
inline constexpr std::uint64_t kMeasure = 5;
inline constexpr std::uint64_t kValidation = 6;
}  // namespace streams

}  // namespace fmtstar
