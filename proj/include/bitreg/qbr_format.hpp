#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bitreg/quantize.hpp"

namespace bitreg {

// .qbr layout (all integers little-endian):
//   "QBR1" | u32 n | u32 d | f64 R | f64 L | u64 masterSeed | payload | u32 crc32(payload)
// The payload packs each sample as xBits[0..d), xSqBits[0..d), yBit, LSB-first,
// samples back to back; only the end of the stream is zero-padded to a byte.

inline constexpr std::size_t kQbrHeaderBytes = 4 + 4 + 4 + 8 + 8 + 8;
inline constexpr std::size_t kQbrTrailerBytes = 4;

/// ceil(n (2d + 1) / 8).
std::size_t qbrPayloadBytes(std::size_t n, std::size_t d);

std::vector<std::uint8_t> encodeDataset(const QuantizedDataset& ds);

/// Throws DataError ("bad magic", "header truncated", "payload truncated",
/// "checksum mismatch", ...) on malformed input.
QuantizedDataset decodeDataset(std::span<const std::uint8_t> bytes);

void writeQbrFile(const std::filesystem::path& path, const QuantizedDataset& ds);
QuantizedDataset readQbrFile(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace bitreg
