#include "dagbft/sim/checkers.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "dagbft/block_dag.hpp"
#include "dagbft/brb.hpp"

namespace dagbft::sim {

namespace {

using LabelIndex = std::map<Label, const LabelRecord*>;

struct Interpretation {
  const TraceEvent* event = nullptr;
  LabelIndex labels;
};

// INTERPRET events of each correct server, by block.
using InterpretIndex = std::map<ServerId, std::map<BlockRef, Interpretation>>;

InterpretIndex index_interpretations(const Trace& t) {
  InterpretIndex idx;
  for (const auto& e : t.events) {
    if (e.kind != EventKind::kInterpret || !t.header.correct(e.server)) continue;
    Interpretation in{&e, {}};
    for (const auto& lr : e.labels) in.labels.emplace(lr.label, &lr);
    idx[e.server].emplace(e.block->ref, std::move(in));
  }
  return idx;
}

std::vector<ServerId> correct_servers(const TraceHeader& h) {
  std::vector<ServerId> out;
  for (std::uint32_t i = 0; i < h.n; ++i) {
    if (h.correct(ServerId{i})) out.push_back(ServerId{i});
  }
  return out;
}

bool contains_message(const std::vector<Message>& v, const Message& m) {
  return std::find(v.begin(), v.end(), m) != v.end();
}

std::string describe(const Message& m) {
  std::ostringstream os;
  os << m.sender << "->" << m.receiver << " " << to_hex(m.payload);
  return os.str();
}

std::string describe(const Label& l) {
  std::ostringstream os;
  os << "(" << l.originator << "," << l.nonce << ")";
  return os.str();
}

}  // namespace

std::size_t Report::count(std::string_view property) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const auto& v) { return v.property == property; }));
}

std::string format_report(const Report& r) {
  std::ostringstream os;
  os << r.name << ": ";
  if (r.ok()) {
    os << "OK (" << r.checked << " checked" << (r.vacuous() ? ", vacuous" : "") << ")\n";
  } else {
    os << r.violations.size() << " violation(s)\n";
  }
  for (const auto& n : r.notes) os << "  note: " << n << '\n';
  for (const auto& v : r.violations) os << "  " << v.property << ": " << v.detail << '\n';
  return os.str();
}

bool drained(const Trace& t) {
  const TraceEvent* end = t.end();
  return t.header.drain && end != nullptr && !end->drain_incomplete;
}

Report check_point_to_point(const Trace& t) {
  Report rep{"point-to-point", {}, 0, {}};
  const auto idx = index_interpretations(t);
  const bool complete = drained(t);
  if (!complete) rep.notes.push_back("run not drained; eventual delivery not checked");

  // Preds of every own block, per correct server.
  std::map<ServerId, std::set<BlockRef>> referenced;
  for (const auto& [s, blocks] : idx) {
    for (const auto& [r, in] : blocks) {
      if (in.event->block->builder != s) continue;
      referenced[s].insert(in.event->block->preds.begin(), in.event->block->preds.end());
    }
  }

  for (const auto& [s, blocks] : idx) {
    std::map<std::tuple<BlockRef, Label, Bytes>, std::size_t> seen;
    for (const auto& [cref, c] : blocks) {
      const BlockInfo& cb = *c.event->block;
      if (cb.builder != s) continue;
      const std::set<BlockRef> preds(cb.preds.begin(), cb.preds.end());

      // Reliable delivery along every edge from a correct builder.
      for (const auto& p : cb.preds) {
        auto pit = blocks.find(p);
        if (pit == blocks.end() || !t.header.correct(pit->second.event->block->builder)) continue;
        for (const auto& lr : pit->second.event->labels) {
          for (const auto& m : lr.out) {
            if (m.receiver != s) continue;
            ++rep.checked;
            bool found = false;
            if (auto cl = c.labels.find(lr.label); cl != c.labels.end()) {
              for (const auto& sm : cl->second->in) {
                if (sm.message == m && std::count(sm.sources.begin(), sm.sources.end(), p) > 0) found = true;
              }
            }
            if (!found) {
              rep.add("reliable-delivery", "block " + cref.short_hex() + " of " + to_string(s) + " references " +
                                               p.short_hex() + " but misses " + describe(m) + " on " +
                                               describe(lr.label));
            }
          }
        }
      }

      for (const auto& lr : c.event->labels) {
        for (const auto& sm : lr.in) {
          ++rep.checked;
          const Message& m = sm.message;
          // No duplication: a (source, label, message) feeds one block only.
          for (const auto& src : sm.sources) {
            auto key = std::tuple(src, lr.label, canonical_encode(m));
            if (++seen[key] > 1) {
              rep.add("no-duplication", to_string(s) + " received " + describe(m) + " from " + src.short_hex() +
                                            " on " + describe(lr.label) + " more than once");
            }
          }
          // Authenticity: every source is a referenced block of the sender
          // whose send buffer holds m.
          bool authentic = !sm.sources.empty();
          for (const auto& src : sm.sources) {
            auto sit = blocks.find(src);
            if (!preds.contains(src) || sit == blocks.end() || sit->second.event->block->builder != m.sender) {
              authentic = false;
              break;
            }
            auto sl = sit->second.labels.find(lr.label);
            if (sl == sit->second.labels.end() || !contains_message(sl->second->out, m)) authentic = false;
          }
          if (!authentic) {
            rep.add("authenticity", "block " + cref.short_hex() + " of " + to_string(s) + " received " +
                                        describe(m) + " on " + describe(lr.label) + " without a signed origin");
          }
        }
      }
    }
  }

  // Eventual delivery: every message a correct block sends to a correct
  // server is picked up by one of that server's blocks.
  if (complete) {
    for (const auto& [s1, blocks] : idx) {
      for (const auto& [r, in] : blocks) {
        if (in.event->block->builder != s1) continue;
        for (const auto& lr : in.event->labels) {
          for (const auto& m : lr.out) {
            if (!t.header.correct(m.receiver)) continue;
            ++rep.checked;
            if (!referenced[m.receiver].contains(r)) {
              rep.add("reliable-delivery", describe(m) + " from block " + r.short_hex() + " on " +
                                               describe(lr.label) + " never received");
            }
          }
        }
      }
    }
  }
  return rep;
}

Report check_brb(const Trace& t) {
  Report rep{"brb", {}, 0, {}};
  const auto correct = correct_servers(t.header);
  const bool complete = drained(t);
  if (!complete) rep.notes.push_back("run not drained; validity and totality not checked");

  std::map<Label, brb::Value> broadcast;
  for (const auto& r : t.header.requests) {
    if (r.server != r.label.originator || !t.header.correct(r.server) || broadcast.contains(r.label)) continue;
    try {
      broadcast.emplace(r.label, brb::decode_broadcast(r.request));
    } catch (const ProtocolError&) {
    }
  }
  std::map<Label, std::map<ServerId, std::vector<brb::Value>>> delivered;
  for (const auto& e : t.events) {
    if (e.kind != EventKind::kIndicate || !e.surfaced || !t.header.correct(e.server)) continue;
    if (auto v = brb::decode_deliver(e.indication)) delivered[*e.label][e.server].push_back(*v);
  }

  std::set<Label> labels;
  for (const auto& [l, v] : broadcast) labels.insert(l);
  for (const auto& [l, d] : delivered) labels.insert(l);

  for (const auto& l : labels) {
    ++rep.checked;
    const auto& dl = delivered[l];
    const auto b = broadcast.find(l);
    const bool correct_origin = t.header.correct(l.originator);
    std::set<brb::Value> values;
    for (const auto& [s, vs] : dl) {
      if (vs.size() > 1) rep.add("no-duplication", to_string(s) + " delivered " + std::to_string(vs.size()) + " times on " + describe(l));
      for (auto v : vs) {
        values.insert(v);
        if (correct_origin && (b == broadcast.end() || b->second != v)) {
          rep.add("integrity", to_string(s) + " delivered " + std::to_string(v) + " on " + describe(l) +
                                   " which its correct originator never broadcast");
        }
      }
    }
    if (values.size() > 1) rep.add("consistency", "correct servers delivered different values on " + describe(l));
    if (!complete) continue;
    if (b != broadcast.end()) {
      for (auto s : correct) {
        auto it = dl.find(s);
        if (it == dl.end() || std::find(it->second.begin(), it->second.end(), b->second) == it->second.end()) {
          rep.add("validity", to_string(s) + " did not deliver " + std::to_string(b->second) + " on " + describe(l));
        }
      }
    }
    if (!dl.empty()) {
      for (auto s : correct) {
        if (!dl.contains(s)) rep.add("totality", to_string(s) + " did not deliver on " + describe(l));
      }
    }
  }
  return rep;
}

DagView dag_at(const Trace& t, ServerId s, std::optional<Step> step) {
  DagView v;
  for (const auto& e : t.events) {
    if (step && e.step > *step) break;
    if (e.server != s || (e.kind != EventKind::kInsert && e.kind != EventKind::kPromote)) continue;
    const BlockInfo& b = *e.block;
    if (v.blocks.contains(b.ref)) continue;
    std::vector<BlockRef> preds;
    for (const auto& p : b.preds) {
      if (std::find(preds.begin(), preds.end(), p) == preds.end()) preds.push_back(p);
    }
    v.graph.insert(b.ref, std::span<const BlockRef>(preds));
    v.blocks.emplace(b.ref, b);
  }
  return v;
}

DagView union_view(const Trace& t) {
  DagView out;
  for (std::uint32_t i = 0; i < t.header.n; ++i) {
    DagView v = dag_at(t, ServerId{i});
    out.graph = graph_union(out.graph, v.graph);
    out.blocks.insert(v.blocks.begin(), v.blocks.end());
  }
  return out;
}

std::string to_dot(const DagView& v) {
  std::map<BlockRef, DotNode> nodes;
  for (const auto& [r, b] : v.blocks) nodes.emplace(r, DotNode{b.builder, b.seq});
  return dagbft::to_dot(v.graph, nodes);
}

std::vector<Step> default_snapshot_steps(const TraceHeader& h) {
  std::set<Step> steps;
  for (Step q = 1; q <= 4; ++q) steps.insert(h.horizon * q / 4);
  return {steps.begin(), steps.end()};
}

Report check_convergence(const Trace& t, std::vector<Step> steps) {
  Report rep{"convergence", {}, 0, {}};
  if (!drained(t)) {
    rep.notes.push_back("run not drained; convergence not checked");
    return rep;
  }
  if (steps.empty()) steps = default_snapshot_steps(t.header);
  const auto correct = correct_servers(t.header);
  std::map<ServerId, DagView> finals;
  for (auto s : correct) finals.emplace(s, dag_at(t, s));
  for (Step step : steps) {
    std::map<ServerId, DagView> snaps;
    for (auto s : correct) snaps.emplace(s, dag_at(t, s, step));
    for (auto s : correct) {
      for (auto s2 : correct) {
        ++rep.checked;
        if (!extends(graph_union(snaps.at(s).graph, snaps.at(s2).graph), finals.at(s).graph)) {
          rep.add("convergence", "final dag of " + to_string(s) + " does not extend the union of the step-" +
                                     std::to_string(step) + " snapshots of " + to_string(s) + " and " +
                                     to_string(s2));
        }
      }
    }
  }
  return rep;
}

Report check_digest_agreement(const Trace& t) {
  Report rep{"digest-agreement", {}, 0, {}};
  const auto idx = index_interpretations(t);
  std::map<BlockRef, std::pair<ServerId, const TraceEvent*>> first;
  for (const auto& [s, blocks] : idx) {
    for (const auto& [r, in] : blocks) {
      auto [it, fresh] = first.emplace(r, std::pair(s, in.event));
      if (fresh) continue;
      ++rep.checked;
      const auto& a = it->second.second->labels;
      const auto& b = in.event->labels;
      bool same = a.size() == b.size();
      for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].label == b[i].label && a[i].digest == b[i].digest;
      if (!same) {
        rep.add("digest-agreement", to_string(it->second.first) + " and " + to_string(s) +
                                        " disagree on the state of block " + r.short_hex());
      }
    }
  }
  return rep;
}

Report check_single_reference(const Trace& t) {
  Report rep{"single-reference", {}, 0, {}};
  std::map<ServerId, std::map<BlockRef, BlockRef>> referrer;
  for (const auto& e : t.events) {
    if (e.kind != EventKind::kInsert || !t.header.correct(e.server)) continue;
    const BlockInfo& b = *e.block;
    std::set<BlockRef> local;
    for (const auto& p : b.preds) {
      ++rep.checked;
      if (!local.insert(p).second) {
        rep.add("single-reference", "block " + b.ref.short_hex() + " of " + to_string(e.server) + " lists " +
                                        p.short_hex() + " twice");
        continue;
      }
      auto [it, fresh] = referrer[e.server].emplace(p, b.ref);
      if (!fresh) {
        rep.add("single-reference", to_string(e.server) + " references " + p.short_hex() + " from " +
                                        it->second.short_hex() + " and " + b.ref.short_hex());
      }
    }
  }
  return rep;
}

Report check_network(const Trace& t) {
  Report rep{"network", {}, 0, {}};
  using Key = std::tuple<ServerId, ServerId, WireKind, std::optional<BlockRef>>;
  std::map<Key, std::int64_t> balance;
  Step last = 0;
  for (const auto& e : t.events) {
    if (e.step < last) rep.add("ordering", "step decreases at " + std::to_string(e.step));
    last = std::max(last, e.step);
    if (e.kind == EventKind::kSend && t.header.correct(e.server) && t.header.correct(e.peer)) {
      ++rep.checked;
      ++balance[Key(e.server, e.peer, e.wire, e.ref)];
    } else if (e.kind == EventKind::kDeliver && t.header.correct(e.server) && t.header.correct(e.peer)) {
      --balance[Key(e.peer, e.server, e.wire, e.ref)];
    }
  }
  const bool complete = drained(t);
  if (!complete) rep.notes.push_back("run not drained; undelivered envelopes not reported");
  for (const auto& [k, n] : balance) {
    if (n < 0) rep.add("deliver-without-send", to_string(std::get<0>(k)) + "->" + to_string(std::get<1>(k)));
    if (n > 0 && complete) rep.add("undelivered", to_string(std::get<0>(k)) + "->" + to_string(std::get<1>(k)));
  }
  return rep;
}

Census message_census(const Trace& t) {
  Census c;
  std::set<std::tuple<BlockRef, Label, Bytes>> materialized;
  std::set<BlockRef> blocks;
  std::set<Label> delivered;
  for (const auto& e : t.events) {
    switch (e.kind) {
      case EventKind::kSend:
        if (e.wire == WireKind::kBlock) ++c.block_envelopes;
        if (e.wire == WireKind::kFwd) ++c.fwd_envelopes;
        if (e.wire == WireKind::kRaw) ++c.raw_envelopes;
        break;
      case EventKind::kInsert:
        if (t.header.correct(e.server)) ++c.correct_blocks;
        blocks.insert(e.block->ref);
        break;
      case EventKind::kPromote:
        blocks.insert(e.block->ref);
        break;
      case EventKind::kInterpret:
        if (!t.header.correct(e.server)) break;
        for (const auto& lr : e.labels) {
          for (const auto& m : lr.out) materialized.emplace(e.block->ref, lr.label, canonical_encode(m));
        }
        break;
      case EventKind::kIndicate:
        if (e.surfaced && t.header.correct(e.server) && brb::decode_deliver(e.indication)) delivered.insert(*e.label);
        break;
      default:
        break;
    }
  }
  c.materialized_messages = materialized.size();
  c.delivered_broadcasts = delivered.size();
  c.distinct_blocks = blocks.size();
  return c;
}

std::string format_census(const Census& c) {
  std::ostringstream os;
  os << "BLOCK envelopes: " << c.block_envelopes << '\n'
     << "FWD envelopes: " << c.fwd_envelopes << '\n'
     << "undecodable envelopes: " << c.raw_envelopes << '\n'
     << "protocol messages on the wire: " << c.protocol_envelopes << '\n'
     << "materialized protocol messages: " << c.materialized_messages << '\n'
     << "delivered broadcasts: " << c.delivered_broadcasts << '\n'
     << "blocks built by correct servers: " << c.correct_blocks << '\n'
     << "distinct blocks: " << c.distinct_blocks << '\n';
  return os.str();
}

}  // namespace dagbft::sim
