#pragma once

// Deterministic replay of protocol instances over a block DAG. Every block
// is a batch of sends by its builder; every edge delivers the pred's
// messages addressed to the referencing block's builder.

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "dagbft/block_dag.hpp"
#include "dagbft/protocol.hpp"

namespace dagbft {

using MessageSet = std::set<Message, MessageLess>;

// Per-block buffers. Absent until the block is interpreted.
struct BlockSlots {
  std::map<Label, std::unique_ptr<ProcessInstance>> pis;
  std::map<Label, MessageSet> ms_in;
  std::map<Label, MessageSet> ms_out;
};

struct TaggedIndication {
  Label label;
  Indication indication;
  ServerId on_behalf_of;  // builder of the block that raised it
  BlockRef block;
};

// One received message together with the preds whose ms_out held it.
struct SourcedMessage {
  Message message;
  std::vector<BlockRef> sources;
};

struct LabelRecord {
  Label label;
  std::vector<SourcedMessage> in;  // ascending <_M
  std::vector<Message> out;        // ascending <_M
  Digest digest;
};

// What interpreting one block did, for tracing.
struct InterpretRecord {
  BlockRef ref;
  ServerId builder;
  std::uint64_t seq = 0;
  std::vector<BlockRef> preds;     // distinct, in block order
  std::vector<LabelRecord> labels; // every label requested here or in a strict ancestor
  std::uint64_t skipped_requests = 0;
};

struct InterpretOptions {
  // Labels instantiated at every genesis block instead of on first use.
  std::set<Label> eager_labels;
  // Assert slot emptiness before and slot immutability after each block.
  bool self_check = false;
};

class Interpreter {
 public:
  // Receives the index range size, returns the chosen index.
  using Picker = std::function<std::size_t(std::size_t)>;

  explicit Interpreter(std::shared_ptr<const ProtocolFactory> factory, InterpretOptions options = {});

  // Throws UnknownBlockError when r is not in the dag.
  bool eligible(const BlockDag& dag, const BlockRef& r) const;
  bool interpreted(const BlockRef& r) const { return slots_.contains(r); }

  // Throws ContractViolation unless eligible.
  InterpretRecord interpret_block(const BlockDag& dag, const BlockRef& r);

  // Least eligible ref first until nothing is eligible.
  std::size_t run_to_fixpoint(const BlockDag& dag, std::vector<InterpretRecord>* records = nullptr);
  // Same, choosing among the eligible refs (ascending) with `pick`.
  std::size_t run_to_fixpoint(const BlockDag& dag, const Picker& pick,
                              std::vector<InterpretRecord>* records = nullptr);

  // Digest of pis(b)[l] (a fresh instance if absent) and the sorted
  // ms_out(b)[l]. Throws ContractViolation for an uninterpreted block.
  Digest state_digest(const BlockRef& b, const Label& l) const;
  // Throws ContractViolation for an uninterpreted block.
  const BlockSlots& slots(const BlockRef& b) const;
  // Labels requested in b or any ancestor of b.
  const std::set<Label>& labels(const BlockRef& b) const;
  bool has_output(const BlockRef& b) const;

  std::vector<TaggedIndication> take_indications();
  std::uint64_t skipped_requests() const { return skipped_requests_; }
  std::size_t interpreted_count() const { return slots_.size(); }

  // Recomputes every stored digest; throws ContractViolation on change.
  void verify_immutability() const;

 private:
  ProcessInstance& instance(BlockSlots& s, const Label& l, ServerId server) const;
  Digest compute_digest(const BlockRef& b, const Label& l) const;
  void collect_todo(const BlockDag& dag);

  std::shared_ptr<const ProtocolFactory> factory_;
  InterpretOptions options_;
  std::map<BlockRef, BlockSlots> slots_;
  std::map<BlockRef, std::set<Label>> labels_;
  std::map<BlockRef, ServerId> builders_;
  std::map<std::pair<BlockRef, Label>, Digest> sealed_;  // self_check only
  std::set<BlockRef> todo_;
  std::vector<TaggedIndication> indications_;
  std::uint64_t skipped_requests_ = 0;
};

}  // namespace dagbft
