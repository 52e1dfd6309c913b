#pragma once

// Authenticated double-echo byzantine reliable broadcast as a
// ProcessInstance. One instance per (label, server); one value per label.

#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "dagbft/protocol.hpp"

namespace dagbft::brb {

using Value = std::uint64_t;

enum class Kind : std::uint8_t {
  kEcho = 1,
  kReady = 2,
};

struct BrbMessage {
  Kind kind = Kind::kEcho;
  Value value = 0;
  bool operator==(const BrbMessage&) const = default;
};

// Payload codecs: 1-byte tag + 8-byte big-endian value.
Bytes encode(const BrbMessage& m);
// nullopt for unknown tags or a wrong length.
std::optional<BrbMessage> decode_message(std::span<const std::uint8_t> payload);

inline constexpr std::uint8_t kBroadcastTag = 0x01;
inline constexpr std::uint8_t kDeliverTag = 0x01;

Request broadcast_request(Value v);
// Throws ProtocolError.
Value decode_broadcast(const Request& r);

Indication deliver_indication(Value v);
// nullopt if the payload is not a deliver(v).
std::optional<Value> decode_deliver(const Indication& i);

struct BrbState {
  bool echoed = false;
  bool readied = false;
  bool delivered = false;
  std::map<Value, std::set<ServerId>> echo_senders;
  std::map<Value, std::set<ServerId>> ready_senders;
};

class BrbInstance final : public ProcessInstance {
 public:
  BrbInstance(Label label, ServerId server, SystemSize size);

  std::unique_ptr<ProcessInstance> clone() const override;
  Bytes encode_state() const override;

  const BrbState& state() const { return state_; }

 protected:
  std::vector<Message> on_request(const Request& r) override;
  std::vector<Message> on_receive(const Message& m) override;

 private:
  void send_to_all(std::vector<Message>& out, Kind kind, Value v) const;

  SystemSize size_;
  BrbState state_;
};

class BrbFactory final : public ProtocolFactory {
 public:
  using ProtocolFactory::ProtocolFactory;
  std::unique_ptr<ProcessInstance> create(const Label& label, ServerId server) const override;
};

}  // namespace dagbft::brb
