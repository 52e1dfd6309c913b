#pragma once

// Trace checkers. Each returns a report; violations are entries, never
// exceptions. Only events of correct servers are trusted.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dagbft/digraph.hpp"
#include "dagbft/sim/trace.hpp"

namespace dagbft::sim {

struct Violation {
  std::string property;
  std::string detail;
};

struct Report {
  std::string name;
  std::vector<Violation> violations;
  std::size_t checked = 0;  // number of items examined
  std::vector<std::string> notes;

  bool ok() const { return violations.empty(); }
  bool vacuous() const { return checked == 0; }
  std::size_t count(std::string_view property) const;
  void add(std::string property, std::string detail) { violations.push_back({std::move(property), std::move(detail)}); }
};

std::string format_report(const Report& r);

// True when the run drained to completion (END present, no incomplete flag).
bool drained(const Trace& t);

// Reliable delivery, no duplication, authenticity over the receive buffers
// of correct servers' own blocks. A message is identified by
// (source block, label, message).
Report check_point_to_point(const Trace& t);

// Validity, no duplication, integrity, consistency, totality of BRB
// deliveries surfaced at correct servers.
Report check_brb(const Trace& t);

// For every snapshot step and every ordered pair of correct servers:
// extends(union(snap_s, snap_s'), final_s). Empty `steps` picks defaults.
Report check_convergence(const Trace& t, std::vector<Step> steps = {});

// Equal digests and label sets for every block interpreted by two correct
// servers.
Report check_digest_agreement(const Trace& t);

// No correct server references a block from two of its own blocks, nor
// twice from one.
Report check_single_reference(const Trace& t);

// Every SEND between correct servers has a matching DELIVER, and steps
// never decrease.
Report check_network(const Trace& t);

struct Census {
  std::uint64_t block_envelopes = 0;
  std::uint64_t fwd_envelopes = 0;
  std::uint64_t raw_envelopes = 0;     // undecodable bytes from byzantine senders
  std::uint64_t protocol_envelopes = 0;  // no wire kind exists for them
  std::uint64_t materialized_messages = 0;  // distinct (block, label, message) in correct ms_out
  std::uint64_t delivered_broadcasts = 0;   // labels delivered by some correct server
  std::uint64_t correct_blocks = 0;
  std::uint64_t distinct_blocks = 0;
};

Census message_census(const Trace& t);
std::string format_census(const Census& c);

// A server's dag as recorded by its INSERT/PROMOTE events up to `step`
// (inclusive; all events when nullopt).
struct DagView {
  Digraph<BlockRef> graph;
  std::map<BlockRef, BlockInfo> blocks;
};

DagView dag_at(const Trace& t, ServerId s, std::optional<Step> step = std::nullopt);
// Union over every server's view.
DagView union_view(const Trace& t);
std::string to_dot(const DagView& v);

// Quarter points of the horizon.
std::vector<Step> default_snapshot_steps(const TraceHeader& h);

}  // namespace dagbft::sim
