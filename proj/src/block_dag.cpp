#include "dagbft/block_dag.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>
#include <vector>

#include "dagbft/errors.hpp"

namespace dagbft {

std::string_view to_string(Validity v) {
  switch (v) {
    case Validity::kValid: return "valid";
    case Validity::kUnknownBuilder: return "unknown builder";
    case Validity::kBadSignature: return "signature does not verify";
    case Validity::kMissingPred: return "predecessor not in dag";
    case Validity::kNoParent: return "non-genesis block without parent";
    case Validity::kMultipleParents: return "more than one parent";
  }
  return "?";
}

std::optional<BlockRef> parent(const BlockDag& view, const Block& b) {
  if (b.is_genesis()) return std::nullopt;
  std::optional<BlockRef> found;
  for (const auto& p : unique_preds(b)) {
    const Block* pb = view.find(p);
    if (pb == nullptr || pb->builder != b.builder || pb->seq + 1 != b.seq) continue;
    if (found) throw MalformedBlockError("block lists two parents");
    found = p;
  }
  return found;
}

BlockDag::BlockDag(ServerId owner, std::shared_ptr<const KeyRegistry> keys)
    : owner_(owner), keys_(std::move(keys)) {
  if (!keys_) throw ContractViolation("BlockDag needs a key registry");
}

const Block* BlockDag::find(const BlockRef& r) const {
  auto it = blocks_.find(r);
  return it == blocks_.end() ? nullptr : &it->second;
}

const Block& BlockDag::at(const BlockRef& r) const {
  if (const Block* b = find(r)) return *b;
  throw UnknownBlockError("block " + r.short_hex() + " is not in the dag");
}

Validity BlockDag::check(const Block& b) const {
  if (!keys_->knows(b.builder)) return Validity::kUnknownBuilder;
  if (!keys_->verify(b.builder, ref(b).digest, b.signature)) return Validity::kBadSignature;
  return check_links(b);
}

Validity BlockDag::check_links(const Block& b) const {
  if (!keys_->knows(b.builder)) return Validity::kUnknownBuilder;
  for (const auto& p : b.preds) {
    if (!contains(p)) return Validity::kMissingPred;
  }
  if (b.is_genesis()) return Validity::kValid;
  try {
    return parent(*this, b) ? Validity::kValid : Validity::kNoParent;
  } catch (const MalformedBlockError&) {
    return Validity::kMultipleParents;
  }
}

void BlockDag::insert(const Block& b) { insert(b, ref(b)); }

void BlockDag::insert(const Block& b, const BlockRef& r) {
  if (ref(b) != r) throw InsertError("block " + r.short_hex() + ": ref does not match the block contents");
  if (contains(r)) return;
  if (auto v = check(b); v != Validity::kValid) {
    throw InsertError("cannot insert block " + r.short_hex() + ": " + std::string(to_string(v)));
  }
  auto preds = unique_preds(b);
  graph_.insert(r, std::span<const BlockRef>(preds));
  blocks_.emplace(r, b);
}

bool BlockDag::self_check() const {
  if (graph_.size() != blocks_.size()) return false;
  for (const auto& [r, b] : blocks_) {
    if (!graph_.contains(r)) return false;
    auto preds = unique_preds(b);
    if (graph_.predecessors(r).size() != preds.size()) return false;
    for (const auto& p : preds) {
      if (!contains(p) || !graph_.has_edge(p, r)) return false;
    }
  }
  return graph_.is_acyclic();
}

BlockDag dag_union(const BlockDag& g1, const BlockDag& g2) {
  BlockDag out = g1;
  for (const auto& [r, b] : g2.blocks_) out.blocks_.emplace(r, b);
  out.graph_ = graph_union(g1.graph_, g2.graph_);
  return out;
}

std::string to_dot(const Digraph<BlockRef>& graph, const std::map<BlockRef, DotNode>& nodes) {
  auto key = [&](const BlockRef& r) {
    const auto& n = nodes.at(r);
    return std::tuple(n.builder, n.seq, r);
  };
  std::vector<BlockRef> order(graph.vertices().begin(), graph.vertices().end());
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });

  std::ostringstream os;
  os << "digraph blockdag {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& r : order) {
    const auto& n = nodes.at(r);
    os << "  \"" << r.short_hex() << "\" [label=\"" << n.builder.index << '/' << n.seq << "\"];\n";
  }
  for (const auto& to : order) {
    std::vector<BlockRef> from(graph.predecessors(to).begin(), graph.predecessors(to).end());
    std::sort(from.begin(), from.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    const auto& tn = nodes.at(to);
    for (const auto& f : from) {
      const auto& fn = nodes.at(f);
      bool is_parent = fn.builder == tn.builder && fn.seq + 1 == tn.seq;
      os << "  \"" << f.short_hex() << "\" -> \"" << to.short_hex() << '"'
         << (is_parent ? " [style=bold]" : "") << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string to_dot(const BlockDag& dag) {
  std::map<BlockRef, DotNode> nodes;
  for (const auto& [r, b] : dag.blocks()) nodes.emplace(r, DotNode{b.builder, b.seq});
  return to_dot(dag.graph(), nodes);
}

}  // namespace dagbft
