#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bitreg {

// Counter-based random numbers. Every random decision in the library is a pure
// function of (seed, index, coordinate, tag), so results do not depend on the
// order in which samples are processed or on how work is split across threads.

enum class StreamTag : std::uint32_t {
  QuantX = 1,
  QuantXSq = 2,
  QuantY = 3,
  QuantXSecond = 4,
  Sketch = 5,
  SketchGram = 6,
  Design = 7,
  Noise = 8,
  Replication = 9,
  Test = 255,
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Two 64-bit words for the given stream coordinates. `draw` selects further
/// blocks from the same stream (24 bits available).
std::array<std::uint64_t, 2> counterBits(std::uint64_t seed, std::uint64_t index,
                                         std::uint32_t coordinate, StreamTag tag,
                                         std::uint32_t draw = 0);

/// Maps 64 random bits to [0, 1) with 53-bit resolution.
inline double toUnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform on [0, 1) for one decision.
inline double uniform01(std::uint64_t seed, std::uint64_t index, std::uint32_t coordinate,
                        StreamTag tag) {
  return toUnitInterval(counterBits(seed, index, coordinate, tag)[0]);
}

/// Standard normal via Box-Muller on one counter block.
double standardNormal(std::uint64_t seed, std::uint64_t index, std::uint32_t coordinate,
                      StreamTag tag);

/// Derives an independent 64-bit seed, e.g. one per replication.
std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t index,
                         StreamTag tag = StreamTag::Replication);

/// UniformRandomBitGenerator over one counter stream, for use with <random>
/// distributions that need a variable number of draws.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::uint64_t seed, std::uint64_t index, std::uint32_t coordinate, StreamTag tag)
      : seed_(seed), index_(index), coordinate_(coordinate), tag_(tag) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint32_t coordinate_;
  StreamTag tag_;
  std::uint32_t draw_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace bitreg
