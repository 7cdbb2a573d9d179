#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace copeq {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is identified by (seed, stream id); its output is a pure function
/// of those two values and the position, so substreams obtained with split()
/// can be consumed in any order or on any thread without changing results.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) noexcept : RngStream(seed, 0) {}

  /// Independent child stream. split(a).split(b) keys by the tuple (a, b).
  RngStream split(std::uint64_t key) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;
  double exponential() noexcept;
  double normal() noexcept;
  /// Gamma(shape, 1); Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape);

 private:
  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace copeq
