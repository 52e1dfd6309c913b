#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "dagbft/block.hpp"
#include "dagbft/crypto.hpp"
#include "dagbft/digraph.hpp"

namespace dagbft {

enum class Validity {
  kValid,
  kUnknownBuilder,
  kBadSignature,
  kMissingPred,
  kNoParent,
  kMultipleParents,
};

std::string_view to_string(Validity v);

class BlockDag;

// The unique pred of b with the same builder and seq - 1, resolved against
// `view`. nullopt for genesis blocks and for blocks whose parent is not
// (yet) in the view. Throws MalformedBlockError when two preds qualify.
std::optional<BlockRef> parent(const BlockDag& view, const Block& b);

// A server's block DAG. Every vertex passed the validity check against the
// dag as it was when the vertex was inserted, and every pred of a vertex is
// itself a vertex with the matching edge.
class BlockDag {
 public:
  BlockDag(ServerId owner, std::shared_ptr<const KeyRegistry> keys);

  ServerId owner() const { return owner_; }
  const KeyRegistry& keys() const { return *keys_; }
  const std::shared_ptr<const KeyRegistry>& keys_ptr() const { return keys_; }

  bool contains(const BlockRef& r) const { return blocks_.contains(r); }
  const Block* find(const BlockRef& r) const;
  // Throws UnknownBlockError.
  const Block& at(const BlockRef& r) const;

  const std::map<BlockRef, Block>& blocks() const { return blocks_; }
  const Digraph<BlockRef>& graph() const { return graph_; }
  std::size_t size() const { return blocks_.size(); }

  // Signature, parent rule and "all preds already in this dag".
  Validity check(const Block& b) const;
  bool valid(const Block& b) const { return check(b) == Validity::kValid; }
  // check() without the signature step, for callers that verified it once
  // on receipt.
  Validity check_links(const Block& b) const;

  // No-op when the block is already present. Throws InsertError naming the
  // failed precondition otherwise, or when r is not ref(b).
  void insert(const Block& b);
  void insert(const Block& b, const BlockRef& r);

  bool reaches(const BlockRef& from, const BlockRef& to, Closure mode) const {
    return graph_.reaches(from, to, mode);
  }

  // Re-verifies closure and acyclicity over the whole dag.
  bool self_check() const;

 private:
  friend BlockDag dag_union(const BlockDag& g1, const BlockDag& g2);

  ServerId owner_;
  std::shared_ptr<const KeyRegistry> keys_;
  std::map<BlockRef, Block> blocks_;
  Digraph<BlockRef> graph_;
};

inline bool extends(const BlockDag& g1, const BlockDag& g2) { return extends(g1.graph(), g2.graph()); }

// Vertex- and edge-wise union. Keeps g1's owner; does not re-validate.
BlockDag dag_union(const BlockDag& g1, const BlockDag& g2);

struct DotNode {
  ServerId builder;
  std::uint64_t seq = 0;
};

// One node per vertex labelled "n/k", ordered by (n, k, ref); parent edges
// drawn bold.
std::string to_dot(const Digraph<BlockRef>& graph, const std::map<BlockRef, DotNode>& nodes);
std::string to_dot(const BlockDag& dag);

}  // namespace dagbft
