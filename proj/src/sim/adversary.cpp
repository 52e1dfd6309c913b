#include "dagbft/sim/adversary.hpp"

#include <set>

#include "dagbft/brb.hpp"
#include "dagbft/errors.hpp"

namespace dagbft::sim {

Outgoing outgoing(const Envelope& e) {
  Outgoing o{e.to, encode_envelope(e), WireKind::kBlock, std::nullopt};
  if (e.kind == EnvelopeKind::kBlock) {
    o.ref = ref(*e.block);
  } else {
    o.wire = WireKind::kFwd;
    o.ref = e.fwd_ref;
  }
  return o;
}

namespace {

// A correct shim that crashes at a step or withholds from victims.
class ShimAdversary final : public Adversary {
 public:
  ShimAdversary(AdversaryContext ctx, std::optional<Step> crash, std::set<ServerId> victims)
      : shim_(ctx.self, ctx.size, ctx.keys, ctx.handle, ctx.factory, ctx.shim),
        crash_(crash),
        victims_(std::move(victims)) {}

  void request(const Label& label, const Request& r) override { shim_.request(label, r); }

  std::vector<Outgoing> on_envelope(const Envelope& e, Step now) override {
    if (crashed(now)) return {};
    auto res = shim_.on_envelope(e, now);
    if (res.response && !victims_.contains(e.from)) return {outgoing(*res.response)};
    return {};
  }

  std::vector<Outgoing> act(Step now) override {
    if (crashed(now)) return {};
    auto res = shim_.tick(now);
    std::vector<Outgoing> out;
    for (const auto& e : res.fwd_requests) out.push_back(outgoing(e));
    if (res.dissemination) {
      for (const auto& e : res.dissemination->envelopes) {
        if (!victims_.contains(e.to)) out.push_back(outgoing(e));
      }
    }
    return out;
  }

 private:
  bool crashed(Step now) const { return crash_ && now >= *crash_; }

  Shim shim_;
  std::optional<Step> crash_;
  std::set<ServerId> victims_;
};

// Builds its own chain with plain gossip, then tampers with each block:
// forks it (equivocation) or lists every pred twice.
class ForkingAdversary final : public Adversary {
 public:
  ForkingAdversary(AdversaryContext ctx, bool equivocate)
      : self_(ctx.self),
        size_(ctx.size),
        every_k_(ctx.shim.every_k_steps),
        equivocate_(equivocate),
        dag_(std::make_shared<BlockDag>(ctx.self, ctx.keys)),
        rqsts_(std::make_shared<RequestBuffer>()),
        gossip_(ctx.self, ctx.size.n, dag_, rqsts_, ctx.handle, ctx.shim.gossip) {}

  void request(const Label& label, const Request& r) override { rqsts_->put(label, r); }

  std::vector<Outgoing> on_envelope(const Envelope& e, Step now) override {
    if (e.kind == EnvelopeKind::kBlock) {
      gossip_.on_receive_block(*e.block, now);
      return {};
    }
    if (auto resp = gossip_.on_fwd_request(*e.fwd_ref, e.from)) return {outgoing(*resp)};
    return {};
  }

  std::vector<Outgoing> act(Step now) override {
    gossip_.try_promote();
    std::vector<Outgoing> out;
    for (const auto& e : gossip_.request_missing(now)) out.push_back(outgoing(e));
    if (now % every_k_ != 0) return out;

    Block a = gossip_.current();
    a.requests = rqsts_->get(gossip_.config().max_rs_per_block);
    // Forks need a shared parent, so the genesis block is sent as is.
    if (!equivocate_ || a.is_genesis()) {
      if (!equivocate_) {
        const auto preds = a.preds;
        a.preds.insert(a.preds.end(), preds.begin(), preds.end());
      }
      sign_block(a, dag_->keys(), gossip_.handle());
      gossip_.adopt_own_block(a);
      for (std::uint32_t i = 0; i < size_.n; ++i) {
        if (ServerId{i} != self_) out.push_back(outgoing(Envelope::block_to(a, self_, ServerId{i})));
      }
      return out;
    }

    Block b = a;
    b.requests = twisted(a.requests);
    sign_block(a, dag_->keys(), gossip_.handle());
    sign_block(b, dag_->keys(), gossip_.handle());
    dag_->insert(b);
    gossip_.adopt_own_block(a);
    for (std::uint32_t i = 0; i < size_.n; ++i) {
      if (ServerId{i} == self_) continue;
      const Block& fork = i < size_.n / 2 ? a : b;
      out.push_back(outgoing(Envelope::block_to(fork, self_, ServerId{i})));
    }
    return out;
  }

 private:
  // Same requests with every own broadcast(v) turned into broadcast(v + 1);
  // an extra undecodable request when nothing changed.
  std::vector<LabeledRequest> twisted(const std::vector<LabeledRequest>& rs) const {
    std::vector<LabeledRequest> out = rs;
    bool changed = false;
    for (auto& [l, r] : out) {
      if (l.originator != self_) continue;
      try {
        r = brb::broadcast_request(brb::decode_broadcast(r) + 1);
        changed = true;
      } catch (const ProtocolError&) {
      }
    }
    if (!changed) out.emplace_back(Label{self_, ~std::uint64_t{0}}, Request{{0xEE}});
    return out;
  }

  ServerId self_;
  SystemSize size_;
  Step every_k_;
  bool equivocate_;
  std::shared_ptr<BlockDag> dag_;
  std::shared_ptr<RequestBuffer> rqsts_;
  Gossip gossip_;
};

// Undecodable bytes and blocks carrying a signature that does not verify.
class GarbageAdversary final : public Adversary {
 public:
  explicit GarbageAdversary(AdversaryContext ctx)
      : self_(ctx.self), size_(ctx.size), scheme_(ctx.keys->scheme()), rng_(ctx.seed) {}

  std::vector<Outgoing> act(Step now) override {
    std::vector<Outgoing> out;
    Bytes junk(1 + rng_() % 48);
    for (auto& x : junk) x = static_cast<std::uint8_t>(rng_());
    out.push_back(Outgoing{pick_target(), std::move(junk), WireKind::kRaw, std::nullopt});

    Block b{self_, 0, {}, {{Label{self_, now}, Request{{static_cast<std::uint8_t>(rng_())}}}}, {}};
    b.signature.scheme = scheme_;
    b.signature.bytes.resize(scheme_ == SignatureScheme::kEd25519 ? 64 : 32);
    for (auto& x : b.signature.bytes) x = static_cast<std::uint8_t>(rng_());
    out.push_back(outgoing(Envelope::block_to(b, self_, pick_target())));
    return out;
  }

 private:
  ServerId pick_target() {
    std::uint32_t i = static_cast<std::uint32_t>(rng_() % (size_.n - 1));
    return ServerId{i >= self_.index ? i + 1 : i};
  }

  ServerId self_;
  SystemSize size_;
  SignatureScheme scheme_;
  std::mt19937_64 rng_;
};

class SilentAdversary final : public Adversary {
 public:
  std::vector<Outgoing> act(Step) override { return {}; }
};

}  // namespace

std::unique_ptr<Adversary> make_adversary(const BehaviorSpec& spec, AdversaryContext ctx) {
  switch (spec.kind) {
    case BehaviorKind::kSilent:
      return std::make_unique<SilentAdversary>();
    case BehaviorKind::kCrashAt:
      return std::make_unique<ShimAdversary>(std::move(ctx), spec.crash_step, std::set<ServerId>{});
    case BehaviorKind::kSelectiveSend: {
      std::set<ServerId> victims(spec.victims.begin(), spec.victims.end());
      if (victims.empty() && !ctx.correct.empty()) victims.insert(ctx.correct.front());
      return std::make_unique<ShimAdversary>(std::move(ctx), std::nullopt, std::move(victims));
    }
    case BehaviorKind::kEquivocate:
      return std::make_unique<ForkingAdversary>(std::move(ctx), true);
    case BehaviorKind::kDuplicateRefs:
      return std::make_unique<ForkingAdversary>(std::move(ctx), false);
    case BehaviorKind::kGarbage:
      return std::make_unique<GarbageAdversary>(std::move(ctx));
  }
  throw ConfigError("unknown behavior kind");
}

}  // namespace dagbft::sim
