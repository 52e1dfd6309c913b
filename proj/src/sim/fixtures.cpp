#include "dagbft/sim/fixtures.hpp"

#include "dagbft/brb.hpp"
#include "dagbft/interpret.hpp"

namespace dagbft::sim {

namespace {

constexpr std::uint64_t kFixtureKeySeed = 2024;

Fixture make(SystemSize size) {
  Fixture fx;
  fx.size = size;
  fx.keys = make_ed25519_keys(size.n, kFixtureKeySeed);
  return fx;
}

}  // namespace

const BlockRef& Fixture::add(const std::string& name, std::uint32_t builder, std::uint64_t seq,
                             const std::vector<std::string>& preds, std::vector<LabeledRequest> rs) {
  Block b;
  b.builder = ServerId{builder};
  b.seq = seq;
  for (const auto& p : preds) b.preds.push_back(refs.at(p));
  b.requests = std::move(rs);
  sign_block(b, *keys.registry, keys.handles.at(builder));
  order.push_back(name);
  refs[name] = ref(b);
  blocks[name] = std::move(b);
  return refs.at(name);
}

BlockDag Fixture::dag(ServerId owner) const {
  BlockDag g(owner, keys.registry);
  for (const auto& name : order) g.insert(blocks.at(name), refs.at(name));
  return g;
}

Fixture fig2() {
  Fixture fx = make(SystemSize{4, 1});
  fx.add("B1", 0, 0, {});
  fx.add("B2", 1, 0, {});
  fx.add("B3", 0, 1, {"B1", "B2"});
  return fx;
}

Fixture fig3() {
  Fixture fx = fig2();
  fx.add("B4", 0, 1, {"B1", "B2"}, {{Label{ServerId{0}, 1}, brb::broadcast_request(7)}});
  return fx;
}

Fixture fig4(bool extended) {
  Fixture fx = make(SystemSize{4, 1});
  fx.add("B1", 0, 0, {}, {{kFig4Label, brb::broadcast_request(42)}});
  fx.add("G2", 1, 0, {});
  fx.add("G3", 2, 0, {});
  fx.add("G4", 3, 0, {});
  fx.add("B2", 0, 1, {"B1"});
  fx.add("B3", 1, 1, {"G2", "B1"});
  fx.add("B4", 2, 1, {"G3", "B1"});
  fx.add("B5", 3, 1, {"G4", "B1"});
  fx.add("B6", 0, 2, {"B2", "B3", "B4"});
  fx.add("B7", 1, 2, {"B3", "B2", "B4"});
  fx.add("B8", 2, 2, {"B4", "B5", "B3"});
  if (!extended) return fx;
  fx.add("B9", 3, 2, {"B5", "B2", "B3", "B4"});
  fx.add("C1", 0, 3, {"B6", "B7", "B8", "B9"});
  fx.add("C2", 1, 3, {"B7", "B6", "B8", "B9"});
  fx.add("C3", 2, 3, {"B8", "B6", "B7", "B9"});
  fx.add("C4", 3, 3, {"B9", "B6", "B7", "B8"});
  return fx;
}

Trace fixture_trace(const Fixture& fx) {
  Trace t;
  t.header.n = fx.size.n;
  t.header.f = fx.size.f;
  t.header.drain = false;
  const ServerId observer{0};
  for (const auto& name : fx.order) {
    TraceEvent e;
    e.kind = fx.blocks.at(name).builder == observer ? EventKind::kInsert : EventKind::kPromote;
    e.server = observer;
    e.block = block_info(fx.blocks.at(name), fx.refs.at(name));
    t.events.push_back(std::move(e));
  }
  const BlockDag g = fx.dag(observer);
  Interpreter interp(std::make_shared<brb::BrbFactory>(fx.size));
  std::vector<InterpretRecord> records;
  interp.run_to_fixpoint(g, &records);
  for (auto& rec : records) {
    TraceEvent e;
    e.kind = EventKind::kInterpret;
    e.server = observer;
    e.block = BlockInfo{rec.ref, rec.builder, rec.seq, rec.preds, {}};
    e.labels = std::move(rec.labels);
    e.skipped_requests = rec.skipped_requests;
    t.events.push_back(std::move(e));
  }
  for (auto& ind : interp.take_indications()) {
    TraceEvent e;
    e.kind = EventKind::kIndicate;
    e.server = observer;
    e.label = ind.label;
    e.indication = std::move(ind.indication);
    e.on_behalf_of = ind.on_behalf_of;
    e.surfaced = ind.on_behalf_of == observer;
    e.ref = ind.block;
    t.events.push_back(std::move(e));
  }
  TraceEvent end;
  end.kind = EventKind::kEnd;
  t.events.push_back(std::move(end));
  return t;
}

}  // namespace dagbft::sim
