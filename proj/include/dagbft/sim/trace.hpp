#pragma once

// Simulation trace: a header plus a step-ordered event list, stored as
// JSON lines ("dagbft-trace/1").

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dagbft/block.hpp"
#include "dagbft/gossip.hpp"
#include "dagbft/interpret.hpp"

namespace dagbft::sim {

inline constexpr std::string_view kTraceSchema = "dagbft-trace/1";

enum class EventKind {
  kSend,
  kDeliver,
  kInsert,    // own block built
  kPromote,   // received block inserted
  kFwdReq,
  kFwdResp,
  kInterpret,
  kIndicate,
  kDrop,
  kEnd,
};

std::string_view to_string(EventKind k);
// Throws DecodeError.
EventKind event_kind_from_string(std::string_view s);

// Wire kind as seen by the simulator; kRaw marks undecodable bytes.
enum class WireKind { kBlock, kFwd, kRaw };
std::string_view to_string(WireKind k);
WireKind wire_kind_from_string(std::string_view s);

struct BlockInfo {
  BlockRef ref;
  ServerId builder;
  std::uint64_t seq = 0;
  std::vector<BlockRef> preds;  // as listed in the block, duplicates kept
  std::vector<LabeledRequest> requests;
};

BlockInfo block_info(const Block& b, const BlockRef& r);

struct ScheduledRequest {
  Step step = 0;
  ServerId server;
  Label label;
  Request request;
};

struct TraceHeader {
  std::uint32_t n = 0;
  std::uint32_t f = 0;
  std::uint64_t seed = 0;
  Step horizon = 0;
  bool drain = true;
  std::set<ServerId> byzantine;
  std::vector<ScheduledRequest> requests;

  bool correct(ServerId s) const { return s.index < n && !byzantine.contains(s); }
};

struct TraceEvent {
  Step step = 0;
  EventKind kind = EventKind::kSend;
  ServerId server;  // actor: sender, receiver, builder, interpreter
  ServerId peer;    // SEND: to; DELIVER: from; FWD_REQ: asked; FWD_RESP: asker

  // SEND / DELIVER
  WireKind wire = WireKind::kBlock;
  Step deliver_step = 0;  // SEND only
  // SEND / DELIVER / FWD_* / DROP: block ref, or the requested ref.
  std::optional<BlockRef> ref;

  // INSERT / PROMOTE / INTERPRET (requests only for INSERT / PROMOTE)
  std::optional<BlockInfo> block;

  // INTERPRET
  std::vector<LabelRecord> labels;
  std::uint64_t skipped_requests = 0;

  // INDICATE
  std::optional<Label> label;
  Indication indication;
  ServerId on_behalf_of;
  bool surfaced = false;

  // DROP
  std::string reason;

  // END
  bool drain_incomplete = false;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceEvent> events;

  // Convenience for tests: at most one END event, last.
  const TraceEvent* end() const;
};

std::string to_json_line(const TraceHeader& h);
std::string to_json_line(const TraceEvent& e);
void write_trace(std::ostream& os, const Trace& t);
std::string write_trace(const Trace& t);

// Throws DecodeError naming the 1-based line. An empty stream yields an
// empty trace with n = 0.
Trace read_trace(std::istream& is);
Trace read_trace_file(const std::string& path);

}  // namespace dagbft::sim
