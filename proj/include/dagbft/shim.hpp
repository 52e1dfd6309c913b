#pragma once

// User-facing facade for one correct server: request/indicate for the
// embedded protocol, backed by gossip and interpret over a shared dag.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dagbft/gossip.hpp"
#include "dagbft/interpret.hpp"

namespace dagbft {

struct ShimConfig {
  Step every_k_steps = 3;
  GossipConfig gossip;
  InterpretOptions interpret;
};

struct UserIndication {
  Label label;
  Indication indication;
};

enum class DisseminateMode {
  kCadence,  // on every every_k_steps-th step
  kIfWork,   // on cadence, and only while has_work() holds
  kOff,
};

struct TickResult {
  std::vector<BlockRef> promoted;
  std::vector<Envelope> fwd_requests;
  std::optional<Dissemination> dissemination;
  std::vector<InterpretRecord> interpreted;
  std::vector<TaggedIndication> indications;  // all, before the self filter
  std::vector<UserIndication> surfaced;
};

struct EnvelopeResult {
  std::optional<ReceiveOutcome> outcome;  // BLOCK envelopes
  std::optional<Envelope> response;       // FWD envelopes that could be answered
};

class Shim {
 public:
  Shim(ServerId self, SystemSize size, std::shared_ptr<const KeyRegistry> keys, SigningHandle handle,
       std::shared_ptr<const ProtocolFactory> factory, ShimConfig config = {});

  ServerId self() const { return self_; }

  void request(Label label, Request r);

  // Surfaces (l, i) only when it was raised on behalf of this server.
  std::optional<UserIndication> on_interpret_indication(const TaggedIndication& t) const;

  EnvelopeResult on_envelope(const Envelope& e, Step now);

  // Promote, request missing preds, interpret, disseminate per `mode`,
  // interpret the new own block, surface indications.
  TickResult tick(Step now, DisseminateMode mode = DisseminateMode::kCadence, Step horizon = 0);

  // True while the next own block would carry something the other servers
  // still need: pending requests, a pred promoted at or before `horizon`,
  // or a pred (parent included) whose interpretation sent messages.
  bool has_work(Step horizon) const;

  const BlockDag& dag() const { return *dag_; }
  const Gossip& gossip() const { return gossip_; }
  const Interpreter& interpreter() const { return interpreter_; }
  const RequestBuffer& requests() const { return *rqsts_; }
  const std::vector<UserIndication>& surfaced() const { return surfaced_; }

 private:
  ServerId self_;
  ShimConfig config_;
  std::shared_ptr<BlockDag> dag_;
  std::shared_ptr<RequestBuffer> rqsts_;
  Gossip gossip_;
  Interpreter interpreter_;
  std::map<BlockRef, Step> promoted_at_;
  std::vector<UserIndication> surfaced_;
};

}  // namespace dagbft
