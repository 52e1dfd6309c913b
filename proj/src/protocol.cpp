#include "dagbft/protocol.hpp"

#include <algorithm>

#include "dagbft/errors.hpp"

namespace dagbft {

Bytes canonical_encode(const Message& m) {
  ByteWriter w;
  w.u32(m.sender.index).u32(m.receiver.index).var(m.payload);
  return std::move(w).take();
}

Message decode_message(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Message m;
  m.sender = ServerId{r.u32()};
  m.receiver = ServerId{r.u32()};
  m.payload = r.var();
  r.expect_done();
  return m;
}

Bytes canonical_encode(const Request& req) {
  ByteWriter w;
  w.var(req.payload);
  return std::move(w).take();
}

bool message_less(const Message& a, const Message& b) {
  if (a.sender != b.sender) return a.sender < b.sender;
  if (a.receiver != b.receiver) return a.receiver < b.receiver;
  if (a.payload.size() != b.payload.size()) return a.payload.size() < b.payload.size();
  return std::lexicographical_compare(a.payload.begin(), a.payload.end(), b.payload.begin(),
                                      b.payload.end());
}

std::vector<Message> ProcessInstance::request(const Request& r) {
  auto out = on_request(r);
  check_senders(out);
  return out;
}

std::vector<Message> ProcessInstance::receive(const Message& m) {
  if (m.receiver != server_) {
    throw ContractViolation("message for " + to_string(m.receiver) + " fed to instance of " +
                            to_string(server_));
  }
  auto out = on_receive(m);
  check_senders(out);
  return out;
}

std::vector<Indication> ProcessInstance::take_indications() {
  std::vector<Indication> out;
  out.swap(pending_);
  return out;
}

void ProcessInstance::check_senders(const std::vector<Message>& out) const {
  for (const auto& m : out) {
    if (m.sender != server_) {
      throw ContractViolation("instance of " + to_string(server_) + " emitted a message as " +
                              to_string(m.sender));
    }
  }
}

}  // namespace dagbft
