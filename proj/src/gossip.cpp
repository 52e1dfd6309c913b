#include "dagbft/gossip.hpp"

#include <algorithm>

#include "dagbft/errors.hpp"

namespace dagbft {

Bytes encode_envelope(const Envelope& e) {
  ByteWriter w;
  w.u8(kWireVersion).u8(static_cast<std::uint8_t>(e.kind)).u32(e.from.index).u32(e.to.index);
  switch (e.kind) {
    case EnvelopeKind::kBlock:
      if (!e.block) throw ContractViolation("BLOCK envelope without a block");
      w.var(encode_block(*e.block));
      break;
    case EnvelopeKind::kFwd:
      if (!e.fwd_ref) throw ContractViolation("FWD envelope without a ref");
      w.raw(e.fwd_ref->digest.bytes);
      break;
  }
  return std::move(w).take();
}

Envelope decode_envelope(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (auto v = r.u8(); v != kWireVersion) throw DecodeError("unsupported wire version");
  auto kind = r.u8();
  Envelope e;
  e.from = ServerId{r.u32()};
  e.to = ServerId{r.u32()};
  if (kind == static_cast<std::uint8_t>(EnvelopeKind::kBlock)) {
    e.kind = EnvelopeKind::kBlock;
    e.block = decode_block(r.var());
  } else if (kind == static_cast<std::uint8_t>(EnvelopeKind::kFwd)) {
    e.kind = EnvelopeKind::kFwd;
    e.fwd_ref = BlockRef{Digest{r.fixed<32>()}};
  } else {
    throw DecodeError("unknown envelope kind " + std::to_string(kind));
  }
  r.expect_done();
  return e;
}

std::vector<LabeledRequest> RequestBuffer::get(std::size_t max) {
  std::vector<LabeledRequest> out;
  while (!queue_.empty() && out.size() < max) {
    out.push_back(std::move(queue_.front()));
    queue_.pop_front();
  }
  return out;
}

Gossip::Gossip(ServerId self, std::uint32_t n, std::shared_ptr<BlockDag> dag,
               std::shared_ptr<RequestBuffer> rqsts, SigningHandle handle, GossipConfig config)
    : self_(self),
      n_(n),
      dag_(std::move(dag)),
      rqsts_(std::move(rqsts)),
      handle_(std::move(handle)),
      config_(config) {
  if (!dag_ || !rqsts_) throw ContractViolation("gossip needs a dag and a request buffer");
  if (handle_.server() != self_) throw ContractViolation("signing handle belongs to another server");
  current_.builder = self_;
}

ReceiveOutcome Gossip::on_receive_block(const Block& b, Step now) {
  const BlockRef r = ref(b);
  if (dag_->contains(r)) return ReceiveOutcome::kAlreadyInDag;
  if (blks_.contains(r)) return ReceiveOutcome::kAlreadyPending;
  if (!dag_->keys().knows(b.builder)) {
    ++counters_.unknown_builder;
    return ReceiveOutcome::kUnknownBuilder;
  }
  if (!dag_->keys().verify(b.builder, r.digest, b.signature)) {
    ++counters_.bad_signature;
    return ReceiveOutcome::kBadSignature;
  }
  auto& count = pending_per_builder_[b.builder];
  if (count >= config_.max_pending_per_builder) {
    ++counters_.overflow;
    return ReceiveOutcome::kOverflow;
  }
  ++count;
  blks_.emplace(r, Pending{b, now});
  return ReceiveOutcome::kBuffered;
}

std::vector<BlockRef> Gossip::try_promote() {
  std::vector<BlockRef> inserted;
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto it = blks_.begin(); it != blks_.end(); ++it) {
      if (dag_->check_links(it->second.block) != Validity::kValid) continue;
      const BlockRef r = it->first;
      dag_->insert(it->second.block, r);
      current_.preds.push_back(r);
      --pending_per_builder_[it->second.block.builder];
      blks_.erase(it);
      fwd_clock_.erase(r);
      inserted.push_back(r);
      progress = true;
      break;
    }
  }
  return inserted;
}

std::vector<Envelope> Gossip::request_missing(Step now) {
  std::map<BlockRef, std::vector<ServerId>> missing;
  for (const auto& [r, p] : blks_) {
    if (now < p.arrival + config_.fwd_initial_wait) continue;
    for (const auto& pred : unique_preds(p.block)) {
      if (dag_->contains(pred) || blks_.contains(pred)) continue;
      auto& who = missing[pred];
      if (std::find(who.begin(), who.end(), p.block.builder) == who.end()) {
        who.push_back(p.block.builder);
      }
    }
  }
  std::vector<Envelope> out;
  for (auto& [m, who] : missing) {
    auto& clock = fwd_clock_[m];
    if (clock.last && now < *clock.last + config_.fwd_interval) continue;
    std::sort(who.begin(), who.end());
    ServerId target = who[clock.attempts % who.size()];
    ++clock.attempts;
    clock.last = now;
    out.push_back(Envelope::fwd_to(m, self_, target));
  }
  return out;
}

std::optional<Envelope> Gossip::on_fwd_request(const BlockRef& r, ServerId from) const {
  if (const Block* b = dag_->find(r)) return Envelope::block_to(*b, self_, from);
  return std::nullopt;
}

Dissemination Gossip::disseminate() {
  current_.requests = rqsts_->get(config_.max_rs_per_block);
  sign_block(current_, dag_->keys(), handle_);
  Dissemination d{current_, ref(current_), {}};
  dag_->insert(d.block, d.ref);
  for (std::uint32_t i = 0; i < n_; ++i) {
    d.envelopes.push_back(Envelope::block_to(d.block, self_, ServerId{i}));
  }
  last_own_ = d.ref;
  current_ = Block{self_, d.block.seq + 1, {d.ref}, {}, {}};
  return d;
}

BlockRef Gossip::adopt_own_block(const Block& b) {
  if (b.builder != self_) throw ContractViolation("adopt_own_block: foreign block");
  const BlockRef r = ref(b);
  dag_->insert(b, r);
  last_own_ = r;
  current_ = Block{self_, b.seq + 1, {r}, {}, {}};
  return r;
}

}  // namespace dagbft
