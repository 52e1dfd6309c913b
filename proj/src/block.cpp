#include "dagbft/block.hpp"

#include <set>

#include "dagbft/errors.hpp"

namespace dagbft {

namespace {

void write_core(ByteWriter& w, const Block& b) {
  w.u8(kBlockEncodingVersion);
  w.u32(b.builder.index).u64(b.seq);
  w.u32(static_cast<std::uint32_t>(b.preds.size()));
  for (const auto& p : b.preds) w.raw(p.digest.bytes);
  w.u32(static_cast<std::uint32_t>(b.requests.size()));
  for (const auto& [label, req] : b.requests) {
    w.u32(label.originator.index).u64(label.nonce).var(req.payload);
  }
}

}  // namespace

Bytes canonical_encode_core(const Block& b) {
  ByteWriter w;
  write_core(w, b);
  return std::move(w).take();
}

BlockRef ref(const Block& b) { return BlockRef{hash_bytes(canonical_encode_core(b))}; }

Bytes encode_block(const Block& b) {
  ByteWriter w;
  write_core(w, b);
  w.u8(static_cast<std::uint8_t>(b.signature.scheme)).var(b.signature.bytes);
  return std::move(w).take();
}

Block decode_block(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (auto v = r.u8(); v != kBlockEncodingVersion) {
    throw DecodeError("unsupported block encoding version " + std::to_string(v));
  }
  Block b;
  b.builder = ServerId{r.u32()};
  b.seq = r.u64();
  auto npreds = r.u32();
  if (npreds > r.remaining() / Digest::kSize) throw DecodeError("pred count exceeds input");
  b.preds.reserve(npreds);
  for (std::uint32_t i = 0; i < npreds; ++i) b.preds.push_back(BlockRef{Digest{r.fixed<32>()}});
  auto nreqs = r.u32();
  if (nreqs > r.remaining() / 16) throw DecodeError("request count exceeds input");
  for (std::uint32_t i = 0; i < nreqs; ++i) {
    Label l{ServerId{r.u32()}, r.u64()};
    b.requests.emplace_back(l, Request{r.var()});
  }
  auto scheme = r.u8();
  if (scheme > static_cast<std::uint8_t>(SignatureScheme::kHmacSha256)) {
    throw DecodeError("unknown signature scheme " + std::to_string(scheme));
  }
  b.signature.scheme = static_cast<SignatureScheme>(scheme);
  b.signature.bytes = r.var();
  r.expect_done();
  return b;
}

void sign_block(Block& b, const KeyRegistry& keys, const SigningHandle& handle) {
  b.signature = keys.sign(handle, ref(b).digest);
}

std::vector<BlockRef> unique_preds(const Block& b) {
  std::vector<BlockRef> out;
  std::set<BlockRef> seen;
  for (const auto& p : b.preds) {
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

}  // namespace dagbft
