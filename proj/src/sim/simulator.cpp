#include "dagbft/sim/simulator.hpp"

#include <algorithm>

#include "dagbft/brb.hpp"
#include "dagbft/errors.hpp"

namespace dagbft::sim {

namespace {

std::string_view drop_reason(ReceiveOutcome o) {
  switch (o) {
    case ReceiveOutcome::kUnknownBuilder: return "unknown_builder";
    case ReceiveOutcome::kBadSignature: return "bad_signature";
    case ReceiveOutcome::kOverflow: return "overflow";
    default: return {};
  }
}

}  // namespace

Simulator::Simulator(Scenario scenario, std::shared_ptr<const ProtocolFactory> factory)
    : scenario_(std::move(scenario)), factory_(std::move(factory)), rng_(scenario_.seed) {
  validate(scenario_);
  const SystemSize size = scenario_.size;
  if (!factory_) factory_ = std::make_shared<brb::BrbFactory>(size);
  KeySetup setup = scenario_.scheme == SignatureScheme::kEd25519 ? make_ed25519_keys(size.n, scenario_.seed)
                                                                 : make_mac_keys(size.n, scenario_.seed);
  keys_ = setup.registry;

  ShimConfig config;
  config.every_k_steps = scenario_.every_k_steps;
  config.gossip = scenario_.gossip;
  config.interpret.self_check = scenario_.self_check;

  std::vector<ServerId> correct;
  for (std::uint32_t i = 0; i < size.n; ++i) {
    if (scenario_.correct(ServerId{i})) correct.push_back(ServerId{i});
  }
  for (std::uint32_t i = 0; i < size.n; ++i) {
    const ServerId id{i};
    if (auto it = scenario_.byzantine.find(id); it != scenario_.byzantine.end()) {
      AdversaryContext ctx{id,       size,   keys_, setup.handles[i], factory_, config,
                           scenario_.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1)), correct};
      adversaries_.emplace(id, make_adversary(it->second, std::move(ctx)));
    } else {
      shims_.emplace(id, std::make_unique<Shim>(id, size, keys_, setup.handles[i], factory_, config));
    }
  }

  auto& h = trace_.header;
  h.n = size.n;
  h.f = size.f;
  h.seed = scenario_.seed;
  h.horizon = scenario_.max_steps;
  h.drain = scenario_.drain;
  for (const auto& [id, spec] : scenario_.byzantine) h.byzantine.insert(id);
  h.requests = scenario_.requests;
  std::stable_sort(h.requests.begin(), h.requests.end(),
                   [](const auto& a, const auto& b) { return a.step < b.step; });
}

Simulator::~Simulator() = default;

const Shim& Simulator::shim(ServerId s) const {
  auto it = shims_.find(s);
  if (it == shims_.end()) throw ContractViolation(to_string(s) + " is not a correct server");
  return *it->second;
}

void Simulator::send(Step now, ServerId from, Outgoing o) {
  const Step span = scenario_.max_delay - scenario_.min_delay + 1;
  const Step at = now + scenario_.min_delay + rng_() % span;
  TraceEvent e;
  e.step = now;
  e.kind = EventKind::kSend;
  e.server = from;
  e.peer = o.to;
  e.wire = o.wire;
  e.deliver_step = at;
  e.ref = o.ref;
  emit(std::move(e));
  Digest h = hash_bytes(o.bytes);
  inflight_.insert(InFlight{at, o.to, from, now, h, seq_++, std::move(o.bytes)});
  ++stats_.envelopes;
}

void Simulator::deliver(Step now, const InFlight& f) {
  auto sit = shims_.find(f.to);
  Shim* shim = sit == shims_.end() ? nullptr : sit->second.get();

  TraceEvent d;
  d.step = now;
  d.kind = EventKind::kDeliver;
  d.server = f.to;
  d.peer = f.from;
  auto drop = [&](std::string reason, std::optional<BlockRef> r) {
    if (!shim) return;
    TraceEvent e;
    e.step = now;
    e.kind = EventKind::kDrop;
    e.server = f.to;
    e.peer = f.from;
    e.reason = std::move(reason);
    e.ref = r;
    emit(std::move(e));
  };

  Envelope env;
  try {
    env = decode_envelope(f.bytes);
  } catch (const DecodeError&) {
    d.wire = WireKind::kRaw;
    emit(std::move(d));
    drop("undecodable", std::nullopt);
    return;
  }
  const std::optional<BlockRef> r = env.kind == EnvelopeKind::kBlock ? std::optional(ref(*env.block)) : env.fwd_ref;
  d.wire = env.kind == EnvelopeKind::kBlock ? WireKind::kBlock : WireKind::kFwd;
  d.ref = r;
  emit(std::move(d));

  // Channels are authenticated: the claimed endpoints must be the real ones.
  if (env.from != f.from || env.to != f.to) {
    drop("misaddressed", r);
    return;
  }
  if (!shim) {
    if (now < scenario_.max_steps) {
      auto& box = outbox_[f.to];
      for (auto& o : adversaries_.at(f.to)->on_envelope(env, now)) box.push_back(std::move(o));
    }
    return;
  }
  auto res = shim->on_envelope(env, now);
  if (res.outcome) {
    if (auto reason = drop_reason(*res.outcome); !reason.empty()) drop(std::string(reason), r);
  }
  if (res.response) {
    TraceEvent e;
    e.step = now;
    e.kind = EventKind::kFwdResp;
    e.server = f.to;
    e.peer = f.from;
    e.ref = r;
    emit(std::move(e));
    send(now, f.to, outgoing(*res.response));
  }
}

void Simulator::record_tick(Step now, ServerId s, const TickResult& res) {
  const Shim& sh = *shims_.at(s);
  for (const auto& r : res.promoted) {
    TraceEvent e;
    e.step = now;
    e.kind = EventKind::kPromote;
    e.server = s;
    e.block = block_info(sh.dag().at(r), r);
    emit(std::move(e));
  }
  for (const auto& env : res.fwd_requests) {
    TraceEvent e;
    e.step = now;
    e.kind = EventKind::kFwdReq;
    e.server = s;
    e.peer = env.to;
    e.ref = env.fwd_ref;
    emit(std::move(e));
    send(now, s, outgoing(env));
  }
  if (res.dissemination) {
    TraceEvent e;
    e.step = now;
    e.kind = EventKind::kInsert;
    e.server = s;
    e.block = block_info(res.dissemination->block, res.dissemination->ref);
    emit(std::move(e));
    for (const auto& env : res.dissemination->envelopes) send(now, s, outgoing(env));
    ++stats_.own_blocks[s];
  }
  for (const auto& rec : res.interpreted) {
    TraceEvent e;
    e.step = now;
    e.kind = EventKind::kInterpret;
    e.server = s;
    e.block = BlockInfo{rec.ref, rec.builder, rec.seq, rec.preds, {}};
    e.labels = rec.labels;
    e.skipped_requests = rec.skipped_requests;
    emit(std::move(e));
  }
  for (const auto& t : res.indications) {
    TraceEvent e;
    e.step = now;
    e.kind = EventKind::kIndicate;
    e.server = s;
    e.label = t.label;
    e.indication = t.indication;
    e.on_behalf_of = t.on_behalf_of;
    e.surfaced = t.on_behalf_of == s;
    e.ref = t.block;
    emit(std::move(e));
  }
}

bool Simulator::drained() const {
  for (const auto& f : inflight_) {
    if (shims_.contains(f.to)) return false;
  }
  for (const auto& [id, sh] : shims_) {
    if (sh->has_work(scenario_.max_steps)) return false;
  }
  // A missing pred still counts when a correct server that referenced it
  // holds it, since FWD rotation will reach that server.
  for (const auto& [id, sh] : shims_) {
    const auto& pending = sh->gossip().pending();
    for (const auto& [r, p] : pending) {
      auto holder = shims_.find(p.block.builder);
      if (holder == shims_.end()) continue;
      for (const auto& q : unique_preds(p.block)) {
        if (sh->dag().contains(q) || pending.contains(q)) continue;
        if (holder->second->dag().contains(q)) return false;
      }
    }
  }
  return true;
}

const Trace& Simulator::run() {
  if (ran_) return trace_;
  ran_ = true;
  const auto& reqs = trace_.header.requests;
  std::size_t next_req = 0;
  const Step horizon = scenario_.max_steps;

  for (Step t = 0;; ++t) {
    const bool active = t < horizon;
    for (; next_req < reqs.size() && reqs[next_req].step == t; ++next_req) {
      const auto& rq = reqs[next_req];
      if (auto it = shims_.find(rq.server); it != shims_.end()) {
        it->second->request(rq.label, rq.request);
      } else {
        adversaries_.at(rq.server)->request(rq.label, rq.request);
      }
    }
    while (!inflight_.empty() && inflight_.begin()->deliver <= t) {
      auto node = inflight_.extract(inflight_.begin());
      deliver(t, node.value());
    }
    for (std::uint32_t i = 0; i < scenario_.size.n; ++i) {
      const ServerId id{i};
      if (auto it = shims_.find(id); it != shims_.end()) {
        const auto mode = active ? DisseminateMode::kCadence
                                 : (scenario_.drain ? DisseminateMode::kIfWork : DisseminateMode::kOff);
        record_tick(t, id, it->second->tick(t, mode, horizon));
        continue;
      }
      if (!active) continue;
      auto& box = outbox_[id];
      for (auto& o : adversaries_.at(id)->act(t)) box.push_back(std::move(o));
      for (std::size_t k = 0; k < scenario_.adversary_budget && !box.empty(); ++k) {
        send(t, id, std::move(box.front()));
        box.pop_front();
      }
    }
    stats_.final_step = t;
    if (t + 1 < horizon) continue;
    if (!scenario_.drain || drained()) break;
    if (t >= horizon + scenario_.drain_cap) {
      stats_.drain_incomplete = true;
      break;
    }
  }

  TraceEvent end;
  end.step = stats_.final_step;
  end.kind = EventKind::kEnd;
  end.drain_incomplete = stats_.drain_incomplete;
  emit(std::move(end));
  return trace_;
}

Trace run(const Scenario& s) {
  Simulator sim(s);
  return sim.run();
}

}  // namespace dagbft::sim
