#include "doctest.h"

#include <filesystem>

#include "bitreg/error.hpp"
#include "bitreg/qbr_format.hpp"
#include "bitreg/rng.hpp"

using namespace bitreg;

namespace {

QuantizedDataset randomDataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X(i, j) = standardNormal(seed, i, j, StreamTag::Test);
    y(i) = standardNormal(seed, i, 99, StreamTag::Test);
  }
  return quantizeDataset(X, y, QuantizerRanges::fromBounds(2.5, 4.0), seed);
}

std::string errorOf(const std::vector<std::uint8_t>& bytes) {
  try {
    decodeDataset(bytes);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("roundtrip is bit-exact and the payload is tightly packed") {
  for (std::size_t n : {1, 7, 64}) {
    for (std::size_t d : {1, 3, 10}) {
      const auto ds = randomDataset(n, d, n * 31 + d);
      const auto bytes = encodeDataset(ds);
      CHECK(bytes.size() == kQbrHeaderBytes + (n * (2 * d + 1) + 7) / 8 + kQbrTrailerBytes);
      CHECK(decodeDataset(bytes).sameContent(ds));
    }
  }
  CHECK(qbrPayloadBytes(3, 1) == 2);
}

TEST_CASE("files roundtrip") {
  const auto ds = randomDataset(20, 4, 5);
  const auto path = std::filesystem::temp_directory_path() / "bitreg_unit_roundtrip.qbr";
  writeQbrFile(path, ds);
  CHECK(readQbrFile(path).sameContent(ds));
  std::filesystem::remove(path);
}

TEST_CASE("corrupt inputs are rejected with specific messages") {
  const auto bytes = encodeDataset(randomDataset(10, 2, 1));
  auto bad = bytes;
  bad[0] = 'X';
  CHECK(errorOf(bad) == "bad magic");
  CHECK(errorOf({bytes.begin(), bytes.begin() + 10}) == "header truncated");
  CHECK(errorOf({bytes.begin(), bytes.begin() + kQbrHeaderBytes + 2}) == "payload truncated");
  CHECK(errorOf({bytes.begin(), bytes.end() - 2}) == "checksum truncated");
  auto longer = bytes;
  longer.push_back(0);
  CHECK(errorOf(longer) == "trailing bytes after checksum");
  auto flipped = bytes;
  flipped[kQbrHeaderBytes] ^= 1;
  CHECK(errorOf(flipped) == "checksum mismatch");
}

TEST_CASE("crc32 check value") {
  const std::string s = "123456789";
  CHECK(crc32({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}) == 0xCBF43926u);
}
