#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace silevy::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is fully determined by (seed, stream id, substream id); the
/// block counter advances as words are consumed. Two streams with distinct
/// ids never share a counter, so batches of paths can be generated in any
/// order or concurrently and still be bit-identical.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform double on (0, 1).
  double uniform_open();

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t substream_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

/// SplitMix64 finalizer; used to fold structured identifiers into stream ids.
std::uint64_t mix64(std::uint64_t x);

/// Combines identifiers into one 64-bit stream id (order-sensitive).
std::uint64_t combine(std::uint64_t a, std::uint64_t b);

/// Standard normal draw (Marsaglia polar method without caching the pair).
double normal(Philox& gen);

/// Poisson draw. Inversion for small means, PTRS rejection otherwise.
std::uint64_t poisson(Philox& gen, double mean);

}  // namespace silevy::rng
