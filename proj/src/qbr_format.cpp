#include "bitreg/qbr_format.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "bitreg/error.hpp"

namespace bitreg {
namespace {

constexpr std::uint8_t kMagic[4] = {'Q', 'B', 'R', '1'};

template <typename T>
void putLittleEndian(std::vector<std::uint8_t>& out, T value) {
  std::uint64_t bits;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
}

template <typename T>
T getLittleEndian(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) bits |= static_cast<std::uint64_t>(bytes[offset + k]) << (8 * k);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void put(bool bit) {
    if (pos_ % 8 == 0) out_.push_back(0);
    if (bit) out_.back() |= static_cast<std::uint8_t>(1u << (pos_ % 8));
    ++pos_;
  }

 private:
  std::vector<std::uint8_t>& out_;
  std::size_t pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint8_t get() {
    const std::uint8_t bit = (bytes_[pos_ / 8] >> (pos_ % 8)) & 1u;
    ++pos_;
    return bit;
  }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = ::crc32(crc, bytes.data() + offset, static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::size_t qbrPayloadBytes(std::size_t n, std::size_t d) { return (n * (2 * d + 1) + 7) / 8; }

std::vector<std::uint8_t> encodeDataset(const QuantizedDataset& ds) {
  ds.validate();
  const std::size_t n = ds.n();
  const std::size_t d = ds.d();
  if (n > std::numeric_limits<std::uint32_t>::max() || d > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("dataset too large for the .qbr format");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kQbrHeaderBytes + qbrPayloadBytes(n, d) + kQbrTrailerBytes);
  putLittleEndian(out, static_cast<std::uint32_t>(n));
  putLittleEndian(out, static_cast<std::uint32_t>(d));
  putLittleEndian(out, ds.ranges.R());
  putLittleEndian(out, ds.ranges.L());
  putLittleEndian(out, ds.masterSeed);

  BitWriter writer(out);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < d; ++j) writer.put(ds.xBits(row, static_cast<Eigen::Index>(j)) != 0);
    for (std::size_t j = 0; j < d; ++j) writer.put(ds.xSqBits(row, static_cast<Eigen::Index>(j)) != 0);
    writer.put(ds.yBits(row) != 0);
  }
  const std::uint32_t crc =
      crc32(std::span<const std::uint8_t>(out).subspan(kQbrHeaderBytes, qbrPayloadBytes(n, d)));
  putLittleEndian(out, crc);
  return out;
}

QuantizedDataset decodeDataset(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw DataError("bad magic");
  if (bytes.size() < kQbrHeaderBytes) throw DataError("header truncated");
  const auto n = getLittleEndian<std::uint32_t>(bytes, 4);
  const auto d = getLittleEndian<std::uint32_t>(bytes, 8);
  const double R = getLittleEndian<double>(bytes, 12);
  const double L = getLittleEndian<double>(bytes, 20);
  const auto seed = getLittleEndian<std::uint64_t>(bytes, 28);

  const std::size_t payload = qbrPayloadBytes(n, d);
  if (bytes.size() < kQbrHeaderBytes + payload) throw DataError("payload truncated");
  if (bytes.size() < kQbrHeaderBytes + payload + kQbrTrailerBytes) throw DataError("checksum truncated");
  if (bytes.size() > kQbrHeaderBytes + payload + kQbrTrailerBytes) throw DataError("trailing bytes after checksum");

  const auto payloadBytes = bytes.subspan(kQbrHeaderBytes, payload);
  if (crc32(payloadBytes) != getLittleEndian<std::uint32_t>(bytes, kQbrHeaderBytes + payload)) {
    throw DataError("checksum mismatch");
  }

  QuantizedDataset ds;
  try {
    ds.ranges = QuantizerRanges::fromBounds(R, L);
  } catch (const InvalidArgument&) {
    throw DataError("invalid ranges in header");
  }
  ds.masterSeed = seed;
  ds.xBits.resize(n, d);
  ds.xSqBits.resize(n, d);
  ds.yBits.resize(n);
  BitReader reader(payloadBytes);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) ds.xBits(i, j) = reader.get();
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) ds.xSqBits(i, j) = reader.get();
    ds.yBits(i) = reader.get();
  }
  while (reader.position() < payload * 8) {
    if (reader.get() != 0) throw DataError("nonzero padding bits");
  }
  return ds;
}

void writeQbrFile(const std::filesystem::path& path, const QuantizedDataset& ds) {
  const auto bytes = encodeDataset(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

QuantizedDataset readQbrFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decodeDataset(bytes);
}

}  // namespace bitreg
