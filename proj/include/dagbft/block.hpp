#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dagbft/bytes.hpp"
#include "dagbft/crypto.hpp"
#include "dagbft/ids.hpp"
#include "dagbft/protocol.hpp"

namespace dagbft {

// Content hash of a block core. Ordered by digest bytes.
struct BlockRef {
  Digest digest;

  auto operator<=>(const BlockRef&) const = default;
  std::string hex() const { return digest.hex(); }
  std::string short_hex() const { return digest.hex().substr(0, 12); }
  static BlockRef from_hex(std::string_view hex) { return BlockRef{Digest::from_hex(hex)}; }
};

using LabeledRequest = std::pair<Label, Request>;

struct Block {
  ServerId builder;                      // n
  std::uint64_t seq = 0;                 // k
  std::vector<BlockRef> preds;           // may repeat refs if built by a byzantine server
  std::vector<LabeledRequest> requests;  // rs
  Signature signature;                   // sigma, not covered by ref()

  bool is_genesis() const { return seq == 0; }
  bool operator==(const Block&) const = default;
};

inline constexpr std::uint8_t kBlockEncodingVersion = 1;

// Versioned encoding of (n, k, preds, rs). Signature excluded.
Bytes canonical_encode_core(const Block& b);

BlockRef ref(const Block& b);

// Full wire encoding: core followed by the signature.
Bytes encode_block(const Block& b);
// Throws DecodeError.
Block decode_block(std::span<const std::uint8_t> bytes);

// Sets b.signature = sign(handle, ref(b)).
void sign_block(Block& b, const KeyRegistry& keys, const SigningHandle& handle);

// preds with duplicates removed, first occurrence kept.
std::vector<BlockRef> unique_preds(const Block& b);

}  // namespace dagbft
