#pragma once

// The black-box protocol contract driven by the interpreter: requests and
// messages go in, messages come out synchronously, indications are pulled.

#include <memory>
#include <vector>

#include "dagbft/bytes.hpp"
#include "dagbft/crypto.hpp"
#include "dagbft/ids.hpp"

namespace dagbft {

// Payload of a user request; the protocol owns the decoding.
struct Request {
  Bytes payload;
  bool operator==(const Request&) const = default;
};

struct Indication {
  Bytes payload;
  bool operator==(const Indication&) const = default;
};

struct Message {
  ServerId sender;
  ServerId receiver;
  Bytes payload;

  bool operator==(const Message&) const = default;
};

// (sender u32, receiver u32, payload u32-length-prefixed).
Bytes canonical_encode(const Message& m);
Message decode_message(std::span<const std::uint8_t> bytes);
Bytes canonical_encode(const Request& r);

// <_M: byte-lexicographic order of canonical_encode. Computed without
// materialising the encoding; the fields are fixed width so comparing
// (sender, receiver, length, payload bytes) is the same order.
bool message_less(const Message& a, const Message& b);

struct MessageLess {
  bool operator()(const Message& a, const Message& b) const { return message_less(a, b); }
};

// One simulated process of a deterministic protocol for a (label, server)
// pair. Public entry points check the contract and stamp nothing: the
// derived class produces the messages, the base class verifies them.
class ProcessInstance {
 public:
  ProcessInstance(Label label, ServerId server) : label_(label), server_(server) {}
  virtual ~ProcessInstance() = default;

  ProcessInstance(const ProcessInstance&) = default;
  ProcessInstance& operator=(const ProcessInstance&) = delete;

  const Label& label() const { return label_; }
  ServerId server() const { return server_; }

  // Throws ProtocolError for an undecodable request; state is unchanged then.
  std::vector<Message> request(const Request& r);

  // Throws ContractViolation when m.receiver != server().
  std::vector<Message> receive(const Message& m);

  // Indications raised since the previous call, oldest first.
  std::vector<Indication> take_indications();

  virtual std::unique_ptr<ProcessInstance> clone() const = 0;

  // Canonical encoding of the full protocol state (identity included).
  virtual Bytes encode_state() const = 0;
  Digest state_digest() const { return hash_bytes(encode_state()); }

 protected:
  virtual std::vector<Message> on_request(const Request& r) = 0;
  virtual std::vector<Message> on_receive(const Message& m) = 0;
  void indicate(Indication i) { pending_.push_back(std::move(i)); }

 private:
  void check_senders(const std::vector<Message>& out) const;

  Label label_;
  ServerId server_;
  std::vector<Indication> pending_;
};

class ProtocolFactory {
 public:
  explicit ProtocolFactory(SystemSize size) : size_(size) {}
  virtual ~ProtocolFactory() = default;

  const SystemSize& size() const { return size_; }
  virtual std::unique_ptr<ProcessInstance> create(const Label& label, ServerId server) const = 0;

 private:
  SystemSize size_;
};

}  // namespace dagbft
