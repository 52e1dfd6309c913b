#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dagbft/bytes.hpp"
#include "dagbft/ids.hpp"

namespace dagbft {

// 32-byte SHA-256 digest. Ordered lexicographically on the bytes, which is
// the iteration order used wherever determinism across machines matters.
struct Digest {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> bytes{};

  auto operator<=>(const Digest&) const = default;
  std::string hex() const { return to_hex(bytes); }
  static Digest from_hex(std::string_view hex);
};

Digest hash_bytes(std::span<const std::uint8_t> data);

enum class SignatureScheme : std::uint8_t {
  kNone = 0,
  kEd25519 = 1,
  kHmacSha256 = 2,
};

struct Signature {
  SignatureScheme scheme = SignatureScheme::kNone;
  Bytes bytes;

  bool operator==(const Signature&) const = default;
};

class Ed25519Registry;
class MacRegistry;

// Private signing capability for exactly one server. Only the registry
// factories can mint one, so a party holding handle s cannot sign as s'.
class SigningHandle {
 public:
  ServerId server() const { return server_; }

 private:
  friend class Ed25519Registry;
  friend class MacRegistry;
  SigningHandle(ServerId server, Bytes secret) : server_(server), secret_(std::move(secret)) {}

  ServerId server_;
  Bytes secret_;
};

// Public side of the signature scheme: verification material for every
// registered server. Immutable after construction, safe to share.
class KeyRegistry {
 public:
  virtual ~KeyRegistry() = default;

  virtual SignatureScheme scheme() const = 0;
  virtual std::uint32_t size() const = 0;
  bool knows(ServerId s) const { return s.index < size(); }

  virtual Signature sign(const SigningHandle& handle, const Digest& digest) const = 0;

  // Throws UnknownServerError for an unregistered server; a wrong
  // signature is an ordinary `false`.
  virtual bool verify(ServerId server, const Digest& digest, const Signature& sig) const = 0;
};

struct KeySetup {
  std::shared_ptr<const KeyRegistry> registry;
  std::vector<SigningHandle> handles;  // handles[i] signs for ServerId{i}
};

// Ed25519 keys derived deterministically from `seed`.
KeySetup make_ed25519_keys(std::uint32_t n, std::uint64_t seed);

// HMAC-SHA256 stub for the simulator. Unforgeability holds because the
// adversary never receives another server's handle, not because of
// public-key hardness.
KeySetup make_mac_keys(std::uint32_t n, std::uint64_t seed);

}  // namespace dagbft
