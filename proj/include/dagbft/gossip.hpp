#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dagbft/block.hpp"
#include "dagbft/block_dag.hpp"
#include "dagbft/crypto.hpp"

namespace dagbft {

// Simulation time, in integer steps.
using Step = std::uint64_t;

enum class EnvelopeKind : std::uint8_t {
  kBlock = 1,
  kFwd = 2,
};

// The only two things that ever travel between servers.
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::kBlock;
  std::optional<Block> block;       // kBlock
  std::optional<BlockRef> fwd_ref;  // kFwd
  ServerId from;
  ServerId to;

  static Envelope block_to(const Block& b, ServerId from, ServerId to) {
    return Envelope{EnvelopeKind::kBlock, b, std::nullopt, from, to};
  }
  static Envelope fwd_to(const BlockRef& r, ServerId from, ServerId to) {
    return Envelope{EnvelopeKind::kFwd, std::nullopt, r, from, to};
  }
};

inline constexpr std::uint8_t kWireVersion = 1;

// version u8, kind u8, from u32, to u32, then the u32-prefixed block
// encoding (kBlock) or the 32-byte ref (kFwd).
Bytes encode_envelope(const Envelope& e);
// Throws DecodeError.
Envelope decode_envelope(std::span<const std::uint8_t> bytes);

// FIFO of (label, request) pairs shared by shim (put) and gossip (get).
class RequestBuffer {
 public:
  void put(Label label, Request request) { queue_.emplace_back(label, std::move(request)); }
  // Removes and returns up to `max` of the oldest entries.
  std::vector<LabeledRequest> get(std::size_t max);
  std::size_t size() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }

 private:
  std::deque<LabeledRequest> queue_;
};

struct GossipConfig {
  std::size_t max_rs_per_block = 8;
  // Minimum spacing between two FWD requests for the same missing ref.
  Step fwd_interval = 5;
  // A received block must have been pending this long before its missing
  // preds are requested.
  Step fwd_initial_wait = 5;
  std::size_t max_pending_per_builder = 1024;
};

enum class ReceiveOutcome {
  kBuffered,
  kAlreadyInDag,
  kAlreadyPending,
  kUnknownBuilder,
  kBadSignature,
  kOverflow,
};

struct GossipCounters {
  std::uint64_t bad_signature = 0;
  std::uint64_t unknown_builder = 0;
  std::uint64_t overflow = 0;
};

struct Dissemination {
  Block block;
  BlockRef ref;
  std::vector<Envelope> envelopes;  // one BLOCK envelope per server, self included
};

// Builds the local block DAG and the server's own next block.
class Gossip {
 public:
  struct Pending {
    Block block;
    Step arrival = 0;
  };

  Gossip(ServerId self, std::uint32_t n, std::shared_ptr<BlockDag> dag,
         std::shared_ptr<RequestBuffer> rqsts, SigningHandle handle, GossipConfig config = {});

  ServerId self() const { return self_; }
  const BlockDag& dag() const { return *dag_; }
  const GossipConfig& config() const { return config_; }

  // Buffers b unless it is already in the dag. Blocks that can never become
  // valid (unknown builder, bad signature) are dropped here and counted.
  ReceiveOutcome on_receive_block(const Block& b, Step now = 0);

  // Inserts every pending block whose preds are all in the dag, cascading
  // to a fixpoint. Among simultaneously insertable blocks the least ref
  // goes first.
  std::vector<BlockRef> try_promote();

  // FWD requests for missing preds of blocks pending at least
  // fwd_initial_wait steps; at most one per missing ref per fwd_interval.
  // Repeated requests rotate over the builders of the referencing blocks.
  std::vector<Envelope> request_missing(Step now);

  std::optional<Envelope> on_fwd_request(const BlockRef& r, ServerId from) const;

  // Drains requests into the current block, signs it, inserts it, and
  // starts the successor block.
  Dissemination disseminate();

  // Inserts an externally built own block (already signed) and restarts
  // the current block on top of it. Used by scripted adversaries.
  BlockRef adopt_own_block(const Block& b);

  const Block& current() const { return current_; }
  const std::map<BlockRef, Pending>& pending() const { return blks_; }
  const std::optional<BlockRef>& last_own() const { return last_own_; }
  const GossipCounters& counters() const { return counters_; }
  const SigningHandle& handle() const { return handle_; }

 private:
  struct FwdClock {
    std::optional<Step> last;
    std::uint64_t attempts = 0;
  };

  ServerId self_;
  std::uint32_t n_;
  std::shared_ptr<BlockDag> dag_;
  std::shared_ptr<RequestBuffer> rqsts_;
  SigningHandle handle_;
  GossipConfig config_;

  Block current_;
  std::map<BlockRef, Pending> blks_;
  std::map<ServerId, std::size_t> pending_per_builder_;
  std::map<BlockRef, FwdClock> fwd_clock_;
  std::optional<BlockRef> last_own_;
  GossipCounters counters_;
};

}  // namespace dagbft
