#include "dagbft/brb.hpp"

#include "dagbft/errors.hpp"

namespace dagbft::brb {

Bytes encode(const BrbMessage& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(m.kind)).u64(m.value);
  return std::move(w).take();
}

std::optional<BrbMessage> decode_message(std::span<const std::uint8_t> payload) {
  if (payload.size() != 9) return std::nullopt;
  ByteReader r(payload);
  auto tag = r.u8();
  if (tag != static_cast<std::uint8_t>(Kind::kEcho) && tag != static_cast<std::uint8_t>(Kind::kReady)) {
    return std::nullopt;
  }
  return BrbMessage{static_cast<Kind>(tag), r.u64()};
}

Request broadcast_request(Value v) {
  ByteWriter w;
  w.u8(kBroadcastTag).u64(v);
  return Request{std::move(w).take()};
}

Value decode_broadcast(const Request& r) {
  if (r.payload.size() != 9 || r.payload[0] != kBroadcastTag) {
    throw ProtocolError("not a broadcast(v) request");
  }
  ByteReader rd(r.payload);
  rd.u8();
  return rd.u64();
}

Indication deliver_indication(Value v) {
  ByteWriter w;
  w.u8(kDeliverTag).u64(v);
  return Indication{std::move(w).take()};
}

std::optional<Value> decode_deliver(const Indication& i) {
  if (i.payload.size() != 9 || i.payload[0] != kDeliverTag) return std::nullopt;
  ByteReader rd(i.payload);
  rd.u8();
  return rd.u64();
}

BrbInstance::BrbInstance(Label label, ServerId server, SystemSize size)
    : ProcessInstance(label, server), size_(size) {}

std::unique_ptr<ProcessInstance> BrbInstance::clone() const {
  return std::make_unique<BrbInstance>(*this);
}

Bytes BrbInstance::encode_state() const {
  ByteWriter w;
  w.u32(label().originator.index).u64(label().nonce).u32(server().index);
  w.u32(size_.n).u32(size_.f);
  w.u8(state_.echoed).u8(state_.readied).u8(state_.delivered);
  for (const auto* senders : {&state_.echo_senders, &state_.ready_senders}) {
    w.u32(static_cast<std::uint32_t>(senders->size()));
    for (const auto& [v, set] : *senders) {
      w.u64(v).u32(static_cast<std::uint32_t>(set.size()));
      for (auto s : set) w.u32(s.index);
    }
  }
  return std::move(w).take();
}

void BrbInstance::send_to_all(std::vector<Message>& out, Kind kind, Value v) const {
  auto payload = encode(BrbMessage{kind, v});
  for (std::uint32_t i = 0; i < size_.n; ++i) out.push_back(Message{server(), ServerId{i}, payload});
}

std::vector<Message> BrbInstance::on_request(const Request& r) {
  Value v = decode_broadcast(r);
  std::vector<Message> out;
  // authenticate(v): only the label's originator may broadcast on it.
  if (server() != label().originator || state_.echoed) return out;
  state_.echoed = true;
  send_to_all(out, Kind::kEcho, v);
  return out;
}

std::vector<Message> BrbInstance::on_receive(const Message& m) {
  std::vector<Message> out;
  auto msg = decode_message(m.payload);
  if (!msg || m.sender.index >= size_.n) return out;
  const Value v = msg->value;
  const std::size_t quorum = 2 * size_.f + 1;

  if (msg->kind == Kind::kEcho) {
    if (!state_.echoed) {
      state_.echoed = true;
      send_to_all(out, Kind::kEcho, v);
    }
    auto& echoes = state_.echo_senders[v];
    echoes.insert(m.sender);
    if (echoes.size() >= quorum && !state_.readied) {
      state_.readied = true;
      send_to_all(out, Kind::kReady, v);
    }
    return out;
  }

  auto& readies = state_.ready_senders[v];
  readies.insert(m.sender);
  if (readies.size() >= size_.f + 1 && !state_.readied) {
    state_.readied = true;
    send_to_all(out, Kind::kReady, v);
  }
  if (readies.size() >= quorum && !state_.delivered) {
    state_.delivered = true;
    indicate(deliver_indication(v));
  }
  return out;
}

std::unique_ptr<ProcessInstance> BrbFactory::create(const Label& label, ServerId server) const {
  return std::make_unique<BrbInstance>(label, server, size());
}

}  // namespace dagbft::brb
