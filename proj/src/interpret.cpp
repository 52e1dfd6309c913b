#include "dagbft/interpret.hpp"

#include "dagbft/errors.hpp"

namespace dagbft {

Interpreter::Interpreter(std::shared_ptr<const ProtocolFactory> factory, InterpretOptions options)
    : factory_(std::move(factory)), options_(std::move(options)) {
  if (!factory_) throw ContractViolation("interpreter needs a protocol factory");
}

bool Interpreter::eligible(const BlockDag& dag, const BlockRef& r) const {
  const Block& b = dag.at(r);
  if (interpreted(r)) return false;
  for (const auto& p : b.preds) {
    if (!interpreted(p)) return false;
  }
  return true;
}

ProcessInstance& Interpreter::instance(BlockSlots& s, const Label& l, ServerId server) const {
  auto& pi = s.pis[l];
  if (!pi) pi = factory_->create(l, server);
  return *pi;
}

InterpretRecord Interpreter::interpret_block(const BlockDag& dag, const BlockRef& r) {
  if (!eligible(dag, r)) throw ContractViolation("block " + r.short_hex() + " is not eligible");
  const Block& b = dag.at(r);
  if (options_.self_check && (labels_.contains(r) || builders_.contains(r))) {
    throw ContractViolation("slots of " + r.short_hex() + " populated before interpretation");
  }
  const auto preds = unique_preds(b);

  BlockSlots s;
  if (auto par = parent(dag, b)) {
    for (const auto& [l, pi] : slots_.at(*par).pis) s.pis.emplace(l, pi->clone());
  } else {
    for (const auto& l : options_.eager_labels) s.pis.emplace(l, factory_->create(l, b.builder));
  }

  std::set<Label> strict;
  for (const auto& p : preds) {
    const auto& pl = labels_.at(p);
    strict.insert(pl.begin(), pl.end());
  }
  std::set<Label> all = strict;
  std::set<Label> touched;
  std::uint64_t skipped = 0;

  for (const auto& [l, req] : b.requests) {
    all.insert(l);
    auto& pi = instance(s, l, b.builder);
    touched.insert(l);
    try {
      for (auto& m : pi.request(req)) s.ms_out[l].insert(std::move(m));
    } catch (const ProtocolError&) {
      ++skipped;
    }
  }

  std::map<Label, std::map<Message, std::vector<BlockRef>, MessageLess>> sources;
  for (const auto& l : strict) {
    MessageSet in;
    for (const auto& p : preds) {
      const auto& out = slots_.at(p).ms_out;
      auto it = out.find(l);
      if (it == out.end()) continue;
      for (const auto& m : it->second) {
        if (m.receiver != b.builder) continue;
        in.insert(m);
        sources[l][m].push_back(p);
      }
    }
    if (in.empty()) continue;
    auto& pi = instance(s, l, b.builder);
    touched.insert(l);
    for (const auto& m : in) {
      for (auto& o : pi.receive(m)) s.ms_out[l].insert(std::move(o));
    }
    s.ms_in[l] = std::move(in);
  }

  for (const auto& l : touched) {
    for (auto& i : s.pis.at(l)->take_indications()) {
      indications_.push_back(TaggedIndication{l, std::move(i), b.builder, r});
    }
  }

  slots_.emplace(r, std::move(s));
  labels_.emplace(r, all);
  builders_.emplace(r, b.builder);
  todo_.erase(r);
  skipped_requests_ += skipped;

  InterpretRecord rec{r, b.builder, b.seq, preds, {}, skipped};
  const BlockSlots& done = slots_.at(r);
  for (const auto& l : all) {
    LabelRecord lr{l, {}, {}, compute_digest(r, l)};
    if (auto it = done.ms_in.find(l); it != done.ms_in.end()) {
      for (const auto& m : it->second) lr.in.push_back(SourcedMessage{m, sources[l][m]});
    }
    if (auto it = done.ms_out.find(l); it != done.ms_out.end()) {
      lr.out.assign(it->second.begin(), it->second.end());
    }
    if (options_.self_check) sealed_.emplace(std::pair(r, l), lr.digest);
    rec.labels.push_back(std::move(lr));
  }

  if (options_.self_check) {
    for (const auto& p : preds) {
      for (const auto& l : labels_.at(p)) {
        if (compute_digest(p, l) != sealed_.at(std::pair(p, l))) {
          throw ContractViolation("slots of " + p.short_hex() + " changed after interpretation");
        }
      }
    }
  }
  return rec;
}

void Interpreter::collect_todo(const BlockDag& dag) {
  for (const auto& [r, b] : dag.blocks()) {
    if (!interpreted(r)) todo_.insert(r);
  }
}

std::size_t Interpreter::run_to_fixpoint(const BlockDag& dag, std::vector<InterpretRecord>* records) {
  collect_todo(dag);
  std::size_t count = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& r : todo_) {
      if (!dag.contains(r) || !eligible(dag, r)) continue;
      auto rec = interpret_block(dag, BlockRef{r});
      if (records) records->push_back(std::move(rec));
      ++count;
      progress = true;
      break;
    }
  }
  return count;
}

std::size_t Interpreter::run_to_fixpoint(const BlockDag& dag, const Picker& pick,
                                         std::vector<InterpretRecord>* records) {
  collect_todo(dag);
  std::size_t count = 0;
  for (;;) {
    std::vector<BlockRef> ready;
    for (const auto& r : todo_) {
      if (dag.contains(r) && eligible(dag, r)) ready.push_back(r);
    }
    if (ready.empty()) break;
    auto rec = interpret_block(dag, ready[pick(ready.size()) % ready.size()]);
    if (records) records->push_back(std::move(rec));
    ++count;
  }
  return count;
}

const BlockSlots& Interpreter::slots(const BlockRef& b) const {
  auto it = slots_.find(b);
  if (it == slots_.end()) throw ContractViolation("block " + b.short_hex() + " is not interpreted");
  return it->second;
}

const std::set<Label>& Interpreter::labels(const BlockRef& b) const {
  auto it = labels_.find(b);
  if (it == labels_.end()) throw ContractViolation("block " + b.short_hex() + " is not interpreted");
  return it->second;
}

bool Interpreter::has_output(const BlockRef& b) const {
  for (const auto& [l, out] : slots(b).ms_out) {
    if (!out.empty()) return true;
  }
  return false;
}

Digest Interpreter::compute_digest(const BlockRef& b, const Label& l) const {
  const BlockSlots& s = slots(b);
  ByteWriter w;
  if (auto it = s.pis.find(l); it != s.pis.end()) {
    w.var(it->second->encode_state());
  } else {
    w.var(factory_->create(l, builders_.at(b))->encode_state());
  }
  auto it = s.ms_out.find(l);
  const std::size_t count = it == s.ms_out.end() ? 0 : it->second.size();
  w.u32(static_cast<std::uint32_t>(count));
  if (count > 0) {
    for (const auto& m : it->second) w.var(canonical_encode(m));
  }
  return hash_bytes(w.bytes());
}

Digest Interpreter::state_digest(const BlockRef& b, const Label& l) const { return compute_digest(b, l); }

std::vector<TaggedIndication> Interpreter::take_indications() {
  std::vector<TaggedIndication> out;
  out.swap(indications_);
  return out;
}

void Interpreter::verify_immutability() const {
  for (const auto& [key, d] : sealed_) {
    if (compute_digest(key.first, key.second) != d) {
      throw ContractViolation("slots of " + key.first.short_hex() + " changed after interpretation");
    }
  }
}

}  // namespace dagbft
