#include "dagbft/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "dagbft/errors.hpp"

namespace dagbft {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  });
}

// Per-server seed material: SHA-256(tag || seed || index).
std::array<std::uint8_t, 32> derive_seed(std::string_view tag, std::uint64_t seed,
                                         std::uint32_t index) {
  ByteWriter w;
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size()));
  w.u64(seed).u32(index);
  return hash_bytes(w.bytes()).bytes;
}

void check_server(const KeyRegistry& r, ServerId s) {
  if (!r.knows(s)) throw UnknownServerError("server " + to_string(s) + " is not registered");
}

}  // namespace

Digest Digest::from_hex(std::string_view hex) {
  auto raw = dagbft::from_hex(hex);
  if (raw.size() != kSize) throw DecodeError("digest must be 32 bytes");
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

Digest hash_bytes(std::span<const std::uint8_t> data) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

class Ed25519Registry final : public KeyRegistry {
 public:
  static KeySetup create(std::uint32_t n, std::uint64_t seed) {
    ensure_sodium();
    auto reg = std::shared_ptr<Ed25519Registry>(new Ed25519Registry());
    KeySetup setup;
    for (std::uint32_t i = 0; i < n; ++i) {
      auto s = derive_seed("dagbft-ed25519", seed, i);
      std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
      Bytes sk(crypto_sign_SECRETKEYBYTES);
      crypto_sign_seed_keypair(pk.data(), sk.data(), s.data());
      reg->public_keys_.push_back(pk);
      setup.handles.push_back(SigningHandle(ServerId{i}, std::move(sk)));
    }
    setup.registry = std::move(reg);
    return setup;
  }

  SignatureScheme scheme() const override { return SignatureScheme::kEd25519; }
  std::uint32_t size() const override { return static_cast<std::uint32_t>(public_keys_.size()); }

  Signature sign(const SigningHandle& handle, const Digest& digest) const override {
    check_server(*this, handle.server());
    Signature sig{SignatureScheme::kEd25519, Bytes(crypto_sign_BYTES)};
    crypto_sign_detached(sig.bytes.data(), nullptr, digest.bytes.data(), digest.bytes.size(),
                         handle.secret_.data());
    return sig;
  }

  bool verify(ServerId server, const Digest& digest, const Signature& sig) const override {
    check_server(*this, server);
    if (sig.scheme != SignatureScheme::kEd25519 || sig.bytes.size() != crypto_sign_BYTES) {
      return false;
    }
    return crypto_sign_verify_detached(sig.bytes.data(), digest.bytes.data(), digest.bytes.size(),
                                       public_keys_[server.index].data()) == 0;
  }

 private:
  Ed25519Registry() = default;
  std::vector<std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES>> public_keys_;
};

class MacRegistry final : public KeyRegistry {
 public:
  static KeySetup create(std::uint32_t n, std::uint64_t seed) {
    ensure_sodium();
    auto reg = std::shared_ptr<MacRegistry>(new MacRegistry());
    KeySetup setup;
    for (std::uint32_t i = 0; i < n; ++i) {
      auto k = derive_seed("dagbft-hmac", seed, i);
      reg->keys_.push_back(k);
      setup.handles.push_back(SigningHandle(ServerId{i}, Bytes(k.begin(), k.end())));
    }
    setup.registry = std::move(reg);
    return setup;
  }

  SignatureScheme scheme() const override { return SignatureScheme::kHmacSha256; }
  std::uint32_t size() const override { return static_cast<std::uint32_t>(keys_.size()); }

  Signature sign(const SigningHandle& handle, const Digest& digest) const override {
    check_server(*this, handle.server());
    return Signature{SignatureScheme::kHmacSha256, mac(handle.secret_.data(), digest)};
  }

  bool verify(ServerId server, const Digest& digest, const Signature& sig) const override {
    check_server(*this, server);
    if (sig.scheme != SignatureScheme::kHmacSha256 ||
        sig.bytes.size() != crypto_auth_hmacsha256_BYTES) {
      return false;
    }
    return crypto_auth_hmacsha256_verify(sig.bytes.data(), digest.bytes.data(),
                                         digest.bytes.size(), keys_[server.index].data()) == 0;
  }

 private:
  MacRegistry() = default;

  static Bytes mac(const std::uint8_t* key, const Digest& digest) {
    Bytes out(crypto_auth_hmacsha256_BYTES);
    crypto_auth_hmacsha256(out.data(), digest.bytes.data(), digest.bytes.size(), key);
    return out;
  }

  std::vector<std::array<std::uint8_t, crypto_auth_hmacsha256_KEYBYTES>> keys_;
};

KeySetup make_ed25519_keys(std::uint32_t n, std::uint64_t seed) {
  return Ed25519Registry::create(n, seed);
}

KeySetup make_mac_keys(std::uint32_t n, std::uint64_t seed) { return MacRegistry::create(n, seed); }

}  // namespace dagbft
