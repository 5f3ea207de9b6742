#include "bitreg/rng.hpp"

#include <cmath>
#include <numbers>

#include "bitreg/error.hpp"

namespace bitreg {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
constexpr std::uint32_t kDrawLimit = 1u << 24;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::array<std::uint64_t, 2> counterBits(std::uint64_t seed, std::uint64_t index,
                                         std::uint32_t coordinate, StreamTag tag,
                                         std::uint32_t draw) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32), coordinate,
                          (static_cast<std::uint32_t>(tag) & 0xFFu) | (draw << 8)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const PhiloxCounter out = philox4x32(ctr, key);
  return {(static_cast<std::uint64_t>(out[0]) << 32) | out[1],
          (static_cast<std::uint64_t>(out[2]) << 32) | out[3]};
}

double standardNormal(std::uint64_t seed, std::uint64_t index, std::uint32_t coordinate,
                      StreamTag tag) {
  const auto bits = counterBits(seed, index, coordinate, tag);
  // u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(bits[0] >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = toUnitInterval(bits[1]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t index, StreamTag tag) {
  return counterBits(seed, index, 0, tag)[0];
}

CounterEngine::result_type CounterEngine::operator()() {
  if (available_ == 0) {
    if (draw_ >= kDrawLimit) throw NumericalError("counter stream exhausted");
    buffer_ = counterBits(seed_, index_, coordinate_, tag_, draw_++);
    available_ = 2;
  }
  return buffer_[2 - available_--];
}

}  // namespace bitreg
