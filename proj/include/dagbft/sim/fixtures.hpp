#pragma once

// Hand-built block DAGs. Server ids are 0-based: s0 is the first server.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dagbft/block_dag.hpp"
#include "dagbft/crypto.hpp"
#include "dagbft/sim/trace.hpp"

namespace dagbft::sim {

struct Fixture {
  SystemSize size;
  KeySetup keys;
  std::vector<std::string> order;  // names in insertion order
  std::map<std::string, Block> blocks;
  std::map<std::string, BlockRef> refs;

  const BlockRef& ref_of(const std::string& name) const { return refs.at(name); }
  // Every block inserted, in order, into a dag owned by `owner`.
  BlockDag dag(ServerId owner = ServerId{0}) const;
  // Signs and records a block; preds given by name.
  const BlockRef& add(const std::string& name, std::uint32_t builder, std::uint64_t seq,
                      const std::vector<std::string>& preds, std::vector<LabeledRequest> rs = {});
};

// B1 (s0, genesis), B2 (s1, genesis), B3 (s0, k=1, preds B1 B2).
Fixture fig2();
// fig2 plus B4, a second s0 block at k=1 with the same preds. B4 also
// requests broadcast(7) on label (s0, 1); without it B4 would equal B3.
Fixture fig3();

// The label carrying broadcast(42) in the broadcast fixture.
inline constexpr Label kFig4Label{ServerId{0}, 1};

// Three columns: B1 (s0, broadcast(42)) with genesis blocks G2..G4; B2..B5
// at k=1; B6..B8 at k=2. With `extended`, B9 (s3, k=2) and a k=3 round
// C1..C4 where every server references all k=2 blocks.
Fixture fig4(bool extended = false);

// Trace of one observer (s0) inserting and interpreting the fixture with
// the BRB protocol. drain is false: it is not a simulated run.
Trace fixture_trace(const Fixture& fx);

}  // namespace dagbft::sim
