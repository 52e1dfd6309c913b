#include "support.hpp"

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dagbft/block_dag.hpp"
#include "dagbft/digraph.hpp"
#include "dagbft/errors.hpp"
#include "dagbft/interpret.hpp"
#include "dagbft/sim/checkers.hpp"
#include "dagbft/sim/fixtures.hpp"
#include "dagbft/sim/generate.hpp"

namespace dagbft::testkit {

Tally insert_lemma(std::uint64_t seed, std::size_t sequences, std::size_t length) {
  Tally t;
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < sequences; ++s) {
    Digraph<int> g;
    std::map<int, std::vector<int>> sources_of;
    int next = 0;
    for (std::size_t step = 0; step < length; ++step) {
      ++t.checked;
      const bool again = next > 0 && rng() % 4 == 0;
      int v;
      std::vector<int> sources;
      if (again) {
        v = static_cast<int>(rng() % next);
        sources = sources_of.at(v);
      } else {
        v = next++;
        for (int u = 0; u < v; ++u) {
          if (rng() % 3 == 0) sources.push_back(u);
        }
        sources_of[v] = sources;
      }
      const Digraph<int> before = g;
      g.insert(v, std::span<const int>(sources));
      std::ostringstream where;
      where << "sequence " << s << " step " << step << " vertex " << v;
      if (again && !(g == before)) t.fail(where.str() + ": re-insert changed the graph");
      if (!extends(before, g)) t.fail(where.str() + ": result does not extend the input");
      if (!g.is_acyclic()) t.fail(where.str() + ": cycle");
      Digraph<int> twice = g;
      twice.insert(v, std::span<const int>(sources));
      if (!(twice == g)) t.fail(where.str() + ": insert is not idempotent");
      for (int u : sources) {
        if (!g.has_edge(u, v)) t.fail(where.str() + ": missing edge");
      }
      if (g.reaches(v, v, Closure::kStrict)) t.fail(where.str() + ": vertex reaches itself");
    }
  }
  return t;
}

namespace {

Block signed_block(const KeySetup& k, std::uint32_t builder, std::uint64_t seq, std::vector<BlockRef> preds,
                   std::uint64_t tag = 0) {
  Block b;
  b.builder = ServerId{builder};
  b.seq = seq;
  b.preds = std::move(preds);
  if (tag != 0) b.requests.push_back({Label{ServerId{builder}, tag}, brb::broadcast_request(tag)});
  sign_block(b, *k.registry, k.handles.at(builder));
  return b;
}

}  // namespace

Tally cycle_attack() {
  Tally t;
  auto k = make_ed25519_keys(4, 32);
  BlockDag g(ServerId{0}, k.registry);
  const Block x = signed_block(k, 0, 0, {});
  const Block y = signed_block(k, 1, 0, {ref(x)});
  g.insert(x);
  g.insert(y);

  auto expect_blocked = [&](const std::string& what, auto&& attempt) {
    ++t.checked;
    try {
      attempt();
    } catch (const InsertError&) {
      return;
    }
    if (!g.self_check()) t.fail(what + ": dag became cyclic");
  };

  // x' lists y as a pred: a new ref, so no edge into the stored x appears.
  Block x2 = x;
  x2.preds = {ref(y)};
  sign_block(x2, *k.registry, k.handles[0]);
  ++t.checked;
  if (ref(x2) == ref(x)) t.fail("changing preds kept the ref");
  expect_blocked("re-pointed copy", [&] { g.insert(x2); });
  ++t.checked;
  if (g.reaches(ref(y), ref(x), Closure::kReflexive)) t.fail("y reaches x");

  // Claim x2's contents under x's ref.
  ++t.checked;
  try {
    g.insert(x2, ref(x));
    t.fail("insert accepted a block under a foreign ref");
  } catch (const InsertError&) {
  }

  // A block whose pred is not yet known cannot enter.
  const Block z = signed_block(k, 2, 0, {}, 5);
  const Block w = signed_block(k, 3, 0, {ref(z)});
  ++t.checked;
  try {
    g.insert(w);
    t.fail("block with unknown pred inserted");
  } catch (const InsertError&) {
  }

  // Self-reference: the pred would have to be the block's own hash.
  Block s = signed_block(k, 2, 0, {});
  s.preds = {ref(s)};
  sign_block(s, *k.registry, k.handles[2]);
  ++t.checked;
  if (s.preds.front() == ref(s)) t.fail("block refers to its own ref");
  expect_blocked("self-reference", [&] { g.insert(s); });

  // Re-inserting an existing ref never adds edges.
  const auto edges = g.graph().edges().size();
  g.insert(y);
  ++t.checked;
  if (g.graph().edges().size() != edges) t.fail("re-insert added edges");

  ++t.checked;
  if (!g.self_check()) t.fail("final dag fails its self-check");
  return t;
}

namespace {

struct OracleMessage {
  brb::Kind kind;
  brb::Value value;
  std::uint32_t sender;
};

struct Emitted {
  std::vector<brb::BrbMessage> sends;  // one entry per send_to_all
  std::vector<brb::Value> delivers;
  bool operator==(const Emitted&) const = default;
};

// What a correct process must emit at step i, computed from scratch over
// the prefix. Thresholds for n=4, f=1: echo quorum 3, ready amplification
// 2, ready delivery 3.
Emitted oracle_step(const std::vector<OracleMessage>& seq, std::size_t i) {
  auto first = [&](auto&& pred) -> std::optional<std::size_t> {
    for (std::size_t j = 0; j < seq.size() && j <= i; ++j) {
      if (pred(j)) return j;
    }
    return std::nullopt;
  };
  auto senders = [&](brb::Kind kind, brb::Value v, std::size_t upto) {
    std::set<std::uint32_t> s;
    for (std::size_t j = 0; j <= upto; ++j) {
      if (seq[j].kind == kind && seq[j].value == v) s.insert(seq[j].sender);
    }
    return s.size();
  };
  Emitted e;
  auto echo_at = first([&](std::size_t j) { return seq[j].kind == brb::Kind::kEcho; });
  if (echo_at == i) e.sends.push_back({brb::Kind::kEcho, seq[i].value});
  auto ready_at = first([&](std::size_t j) {
    const auto& m = seq[j];
    if (m.kind == brb::Kind::kEcho) return senders(brb::Kind::kEcho, m.value, j) >= 3;
    return senders(brb::Kind::kReady, m.value, j) >= 2;
  });
  if (ready_at == i) e.sends.push_back({brb::Kind::kReady, seq[i].value});
  auto deliver_at = first([&](std::size_t j) {
    return seq[j].kind == brb::Kind::kReady && senders(brb::Kind::kReady, seq[j].value, j) >= 3;
  });
  if (deliver_at == i) e.delivers.push_back(seq[i].value);
  return e;
}

Emitted observed(const std::vector<Message>& out, const std::vector<Indication>& ind) {
  Emitted e;
  for (std::size_t j = 0; j < out.size(); j += 4) {
    e.sends.push_back(*brb::decode_message(out[j].payload));
  }
  for (const auto& i : ind) e.delivers.push_back(*brb::decode_deliver(i));
  return e;
}

bool fan_out_ok(const std::vector<Message>& out, ServerId self) {
  if (out.size() % 4 != 0) return false;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (out[j].sender != self || out[j].receiver != ServerId{static_cast<std::uint32_t>(j % 4)}) return false;
    if (out[j].payload != out[j - j % 4].payload) return false;
  }
  return true;
}

}  // namespace

Tally brb_oracle(std::size_t max_len, const std::vector<brb::Value>& values) {
  Tally t;
  std::vector<OracleMessage> alphabet;
  for (auto kind : {brb::Kind::kEcho, brb::Kind::kReady}) {
    for (auto v : values) {
      for (std::uint32_t s = 0; s < 4; ++s) alphabet.push_back({kind, v, s});
    }
  }
  const SystemSize size{4, 1};
  const ServerId self{1};
  const Label label{ServerId{0}, 1};

  std::vector<OracleMessage> seq;
  // Depth-first over all sequences; each prefix is itself a sequence.
  std::function<void(const brb::BrbInstance&)> walk = [&](const brb::BrbInstance& inst) {
    ++t.checked;
    if (seq.size() == max_len) return;
    for (const auto& m : alphabet) {
      seq.push_back(m);
      brb::BrbInstance next = inst;
      auto out = next.receive(Message{ServerId{m.sender}, self, brb::encode({m.kind, m.value})});
      auto ind = next.take_indications();
      if (!fan_out_ok(out, self)) {
        t.fail("outputs are not a send-to-all");
      } else if (observed(out, ind) != oracle_step(seq, seq.size() - 1)) {
        std::ostringstream os;
        os << "mismatch at length " << seq.size() << ", last ("
           << (m.kind == brb::Kind::kEcho ? "ECHO " : "READY ") << m.value << " from s" << m.sender << ")";
        t.fail(os.str());
      }
      walk(next);
      seq.pop_back();
    }
  };
  walk(brb::BrbInstance(label, self, size));
  return t;
}

namespace {

void compare(Tally& t, const Interpreter& a, const Interpreter& b, const BlockDag& shared, const std::string& what) {
  for (const auto& [r, blk] : shared.blocks()) {
    if (!a.interpreted(r) || !b.interpreted(r)) {
      t.fail(what + ": block " + r.short_hex() + " not interpreted by both");
      continue;
    }
    if (a.labels(r) != b.labels(r)) {
      t.fail(what + ": label sets differ at " + r.short_hex());
      continue;
    }
    for (const auto& l : a.labels(r)) {
      ++t.checked;
      if (a.state_digest(r, l) != b.state_digest(r, l)) t.fail(what + ": digest mismatch at " + r.short_hex());
    }
  }
}

}  // namespace

Tally interpretation_determinism(const sim::Simulator& simulator, std::uint64_t picker_seed) {
  Tally t;
  const auto& sc = simulator.scenario();
  const auto& trace = simulator.trace();
  std::mt19937_64 rng(picker_seed);
  const Step mid = sc.max_steps / 2;
  for (std::uint32_t i = 0; i < sc.size.n; ++i) {
    const ServerId s{i};
    if (!sc.correct(s)) continue;
    const Shim& shim = simulator.shim(s);
    const BlockDag& full = shim.dag();

    Interpreter least(simulator.factory());
    least.run_to_fixpoint(full);
    Interpreter random(simulator.factory());
    random.run_to_fixpoint(full, [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); });
    compare(t, least, random, full, to_string(s) + " least-ref vs random order");
    compare(t, least, shim.interpreter(), full, to_string(s) + " offline vs online");

    BlockDag prefix(s, full.keys_ptr());
    for (const auto& e : trace.events) {
      if (e.step > mid) break;
      if (e.server != s || !e.block) continue;
      if (e.kind != sim::EventKind::kInsert && e.kind != sim::EventKind::kPromote) continue;
      prefix.insert(full.at(e.block->ref), e.block->ref);
    }
    if (!extends(prefix, full)) t.fail(to_string(s) + ": prefix dag does not extend to the final dag");
    Interpreter small(simulator.factory());
    small.run_to_fixpoint(prefix);
    compare(t, small, least, prefix, to_string(s) + " G vs G'");
  }
  return t;
}

namespace {

Message brb_msg(std::uint32_t from, std::uint32_t to, brb::Kind kind, brb::Value v) {
  return Message{ServerId{from}, ServerId{to}, brb::encode({kind, v})};
}

MessageSet to_all(std::uint32_t from, brb::Kind kind, brb::Value v) {
  MessageSet out;
  for (std::uint32_t i = 0; i < 4; ++i) out.insert(brb_msg(from, i, kind, v));
  return out;
}

MessageSet slot(const std::map<Label, MessageSet>& m, const Label& l) {
  auto it = m.find(l);
  return it == m.end() ? MessageSet{} : it->second;
}

}  // namespace

Tally fig4_exact() {
  using brb::Kind;
  Tally t;
  const auto fx = sim::fig4(false);
  const BlockDag g = fx.dag();
  Interpreter interp(std::make_shared<brb::BrbFactory>(fx.size));
  interp.run_to_fixpoint(g);
  const Label l = sim::kFig4Label;

  struct Expect {
    std::string name;
    MessageSet in;
    MessageSet out;
  };
  std::vector<Expect> expect{
      {"B1", {}, to_all(0, Kind::kEcho, 42)},
      {"G2", {}, {}},
      {"G3", {}, {}},
      {"G4", {}, {}},
      {"B2", {brb_msg(0, 0, Kind::kEcho, 42)}, {}},
      {"B3", {brb_msg(0, 1, Kind::kEcho, 42)}, to_all(1, Kind::kEcho, 42)},
      {"B4", {brb_msg(0, 2, Kind::kEcho, 42)}, to_all(2, Kind::kEcho, 42)},
      {"B5", {brb_msg(0, 3, Kind::kEcho, 42)}, to_all(3, Kind::kEcho, 42)},
      {"B6", {brb_msg(1, 0, Kind::kEcho, 42), brb_msg(2, 0, Kind::kEcho, 42)}, to_all(0, Kind::kReady, 42)},
      {"B7", {brb_msg(1, 1, Kind::kEcho, 42), brb_msg(2, 1, Kind::kEcho, 42)}, to_all(1, Kind::kReady, 42)},
      {"B8",
       {brb_msg(1, 2, Kind::kEcho, 42), brb_msg(2, 2, Kind::kEcho, 42), brb_msg(3, 2, Kind::kEcho, 42)},
       to_all(2, Kind::kReady, 42)},
  };
  std::size_t total_out = 0;
  for (const auto& e : expect) {
    ++t.checked;
    const auto& s = interp.slots(fx.ref_of(e.name));
    if (slot(s.ms_in, l) != e.in) t.fail(e.name + ": in-buffer differs");
    if (slot(s.ms_out, l) != e.out) t.fail(e.name + ": out-buffer differs");
    for (const auto& [label, out] : s.ms_out) total_out += out.size();
  }
  ++t.checked;
  if (total_out != 28) t.fail("expected 28 materialized messages, got " + std::to_string(total_out));
  ++t.checked;
  if (!interp.take_indications().empty()) t.fail("delivery before the delivering round");

  const auto ext = sim::fig4(true);
  Interpreter full(std::make_shared<brb::BrbFactory>(ext.size));
  full.run_to_fixpoint(ext.dag());
  std::map<ServerId, std::vector<brb::Value>> delivered;
  for (const auto& ind : full.take_indications()) {
    if (ind.label != l) continue;
    if (auto v = brb::decode_deliver(ind.indication)) delivered[ind.on_behalf_of].push_back(*v);
  }
  for (std::uint32_t i = 0; i < 4; ++i) {
    ++t.checked;
    if (delivered[ServerId{i}] != std::vector<brb::Value>{42}) {
      t.fail("s" + std::to_string(i) + " does not deliver 42 exactly once");
    }
  }
  return t;
}

std::vector<std::unique_ptr<sim::Simulator>> bounded_runs(std::size_t count, std::uint64_t first_seed,
                                                          std::size_t max_blocks) {
  std::vector<std::unique_ptr<sim::Simulator>> out;
  for (std::uint64_t seed = first_seed; out.size() < count; ++seed) {
    auto sim = std::make_unique<sim::Simulator>(sim::random_scenario(seed));
    sim->run();
    if (sim::message_census(sim->trace()).distinct_blocks <= max_blocks) out.push_back(std::move(sim));
  }
  return out;
}

namespace {

sim::TraceEvent& interpret_event(sim::Trace& t, const BlockRef& r) {
  for (auto& e : t.events) {
    if (e.kind == sim::EventKind::kInterpret && e.block->ref == r) return e;
  }
  throw ContractViolation("no INTERPRET event for " + r.short_hex());
}

}  // namespace

sim::Trace duplicated_receive_fixture() {
  const auto fx = sim::fig4(false);
  sim::Trace t = sim::fixture_trace(fx);
  auto& labels = interpret_event(t, fx.ref_of("B6")).labels;
  labels.at(0).in.push_back(labels.at(0).in.at(0));
  return t;
}

sim::Trace forged_receive_fixture() {
  const auto fx = sim::fig4(false);
  sim::Trace t = sim::fixture_trace(fx);
  auto& labels = interpret_event(t, fx.ref_of("B6")).labels;
  labels.at(0).in.push_back({brb_msg(3, 0, brb::Kind::kReady, 99), {}});
  return t;
}

std::size_t fwd_requests(const sim::Trace& t) {
  std::size_t n = 0;
  for (const auto& e : t.events) n += e.kind == sim::EventKind::kFwdReq;
  return n;
}

}  // namespace dagbft::testkit
