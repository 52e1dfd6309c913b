#include "dagbft/bytes.hpp"

#include <limits>

#include "dagbft/errors.hpp"

namespace dagbft {

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::raw(std::span<const std::uint8_t> data) {
  out_.insert(out_.end(), data.begin(), data.end());
  return *this;
}

ByteWriter& ByteWriter::var(std::span<const std::uint8_t> data) {
  if (data.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error("ByteWriter: field too long");
  }
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (remaining() < n) {
    throw DecodeError("truncated input: need " + std::to_string(n) + " bytes, have " +
                      std::to_string(remaining()));
  }
  auto s = in_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  auto s = raw(4);
  std::uint32_t v = 0;
  for (auto b : s) v = (v << 8) | b;
  return v;
}

std::uint64_t ByteReader::u64() {
  auto s = raw(8);
  std::uint64_t v = 0;
  for (auto b : s) v = (v << 8) | b;
  return v;
}

Bytes ByteReader::var() {
  auto n = u32();
  auto s = raw(n);
  return Bytes(s.begin(), s.end());
}

void ByteReader::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes: " + std::to_string(remaining()));
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (auto b : data) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace dagbft
