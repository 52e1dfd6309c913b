#pragma once

// Canonical binary encoding helpers. Integers are big-endian and fixed
// width, variable-length fields carry a u32 length prefix.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dagbft {

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  // Fixed-size field, no length prefix.
  ByteWriter& raw(std::span<const std::uint8_t> data);
  // u32 length prefix followed by the bytes.
  ByteWriter& var(std::span<const std::uint8_t> data);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Reads what ByteWriter wrote. Every accessor throws DecodeError on
// truncated input.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::span<const std::uint8_t> raw(std::size_t n);
  Bytes var();

  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    std::array<std::uint8_t, N> a{};
    auto s = raw(N);
    std::copy(s.begin(), s.end(), a.begin());
    return a;
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return remaining() == 0; }
  // Throws DecodeError if unread bytes remain.
  void expect_done() const;

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

}  // namespace dagbft
