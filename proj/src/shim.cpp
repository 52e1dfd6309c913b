#include "dagbft/shim.hpp"

#include "dagbft/errors.hpp"

namespace dagbft {

Shim::Shim(ServerId self, SystemSize size, std::shared_ptr<const KeyRegistry> keys, SigningHandle handle,
           std::shared_ptr<const ProtocolFactory> factory, ShimConfig config)
    : self_(self),
      config_(config),
      dag_(std::make_shared<BlockDag>(self, std::move(keys))),
      rqsts_(std::make_shared<RequestBuffer>()),
      gossip_(self, size.n, dag_, rqsts_, std::move(handle), config.gossip),
      interpreter_(std::move(factory), config.interpret) {
  if (config_.every_k_steps == 0) throw ConfigError("every_k_steps must be positive");
}

void Shim::request(Label label, Request r) { rqsts_->put(label, std::move(r)); }

std::optional<UserIndication> Shim::on_interpret_indication(const TaggedIndication& t) const {
  if (t.on_behalf_of != self_) return std::nullopt;
  return UserIndication{t.label, t.indication};
}

EnvelopeResult Shim::on_envelope(const Envelope& e, Step now) {
  EnvelopeResult res;
  if (e.kind == EnvelopeKind::kBlock) {
    res.outcome = gossip_.on_receive_block(*e.block, now);
  } else {
    res.response = gossip_.on_fwd_request(*e.fwd_ref, e.from);
  }
  return res;
}

bool Shim::has_work(Step horizon) const {
  if (!rqsts_->empty()) return true;
  const auto& preds = gossip_.current().preds;
  const auto& parent = gossip_.last_own();
  for (const auto& p : preds) {
    if (parent && p == *parent) {
      if (interpreter_.interpreted(p) && interpreter_.has_output(p)) return true;
      continue;
    }
    if (auto it = promoted_at_.find(p); it != promoted_at_.end() && it->second <= horizon) return true;
    if (interpreter_.interpreted(p) && interpreter_.has_output(p)) return true;
  }
  return false;
}

TickResult Shim::tick(Step now, DisseminateMode mode, Step horizon) {
  TickResult res;
  res.promoted = gossip_.try_promote();
  for (const auto& r : res.promoted) promoted_at_.emplace(r, now);
  res.fwd_requests = gossip_.request_missing(now);
  interpreter_.run_to_fixpoint(*dag_, &res.interpreted);

  bool due = mode != DisseminateMode::kOff && now % config_.every_k_steps == 0;
  if (due && mode == DisseminateMode::kIfWork) due = has_work(horizon);
  if (due) {
    res.dissemination = gossip_.disseminate();
    interpreter_.run_to_fixpoint(*dag_, &res.interpreted);
  }

  if (config_.interpret.self_check) {
    if (!dag_->self_check()) throw ContractViolation("dag of " + to_string(self_) + " failed its self-check");
    interpreter_.verify_immutability();
  }

  res.indications = interpreter_.take_indications();
  for (const auto& t : res.indications) {
    if (auto u = on_interpret_indication(t)) {
      res.surfaced.push_back(*u);
      surfaced_.push_back(std::move(*u));
    }
  }
  return res;
}

}  // namespace dagbft
