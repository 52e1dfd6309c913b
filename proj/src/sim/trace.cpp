#include "dagbft/sim/trace.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dagbft/errors.hpp"

namespace dagbft::sim {

using nlohmann::json;

namespace {

constexpr std::pair<EventKind, std::string_view> kEventNames[] = {
    {EventKind::kSend, "SEND"},           {EventKind::kDeliver, "DELIVER"},
    {EventKind::kInsert, "INSERT"},       {EventKind::kPromote, "PROMOTE"},
    {EventKind::kFwdReq, "FWD_REQ"},      {EventKind::kFwdResp, "FWD_RESP"},
    {EventKind::kInterpret, "INTERPRET"}, {EventKind::kIndicate, "INDICATE"},
    {EventKind::kDrop, "DROP"},           {EventKind::kEnd, "END"},
};

json label_json(const Label& l) { return json{{"o", l.originator.index}, {"n", l.nonce}}; }

Label label_from(const json& j) { return Label{ServerId{j.at("o").get<std::uint32_t>()}, j.at("n").get<std::uint64_t>()}; }

json message_json(const Message& m) {
  return json{{"s", m.sender.index}, {"r", m.receiver.index}, {"p", to_hex(m.payload)}};
}

Message message_from(const json& j) {
  return Message{ServerId{j.at("s").get<std::uint32_t>()}, ServerId{j.at("r").get<std::uint32_t>()},
                 from_hex(j.at("p").get<std::string>())};
}

json refs_json(const std::vector<BlockRef>& refs) {
  json a = json::array();
  for (const auto& r : refs) a.push_back(r.hex());
  return a;
}

std::vector<BlockRef> refs_from(const json& j) {
  std::vector<BlockRef> out;
  for (const auto& r : j) out.push_back(BlockRef::from_hex(r.get<std::string>()));
  return out;
}

json requests_json(const std::vector<LabeledRequest>& rs) {
  json a = json::array();
  for (const auto& [l, r] : rs) a.push_back(json{{"label", label_json(l)}, {"p", to_hex(r.payload)}});
  return a;
}

std::vector<LabeledRequest> requests_from(const json& j) {
  std::vector<LabeledRequest> out;
  for (const auto& e : j) out.emplace_back(label_from(e.at("label")), Request{from_hex(e.at("p").get<std::string>())});
  return out;
}

json block_json(const BlockInfo& b, bool with_requests) {
  json j{{"ref", b.ref.hex()}, {"n", b.builder.index}, {"k", b.seq}, {"preds", refs_json(b.preds)}};
  if (with_requests) j["rs"] = requests_json(b.requests);
  return j;
}

BlockInfo block_from(const json& j) {
  BlockInfo b;
  b.ref = BlockRef::from_hex(j.at("ref").get<std::string>());
  b.builder = ServerId{j.at("n").get<std::uint32_t>()};
  b.seq = j.at("k").get<std::uint64_t>();
  b.preds = refs_from(j.at("preds"));
  if (j.contains("rs")) b.requests = requests_from(j.at("rs"));
  return b;
}

json labels_json(const std::vector<LabelRecord>& labels) {
  json a = json::array();
  for (const auto& lr : labels) {
    json in = json::array();
    for (const auto& sm : lr.in) {
      json m = message_json(sm.message);
      m["src"] = refs_json(sm.sources);
      in.push_back(std::move(m));
    }
    json out = json::array();
    for (const auto& m : lr.out) out.push_back(message_json(m));
    a.push_back(json{{"label", label_json(lr.label)}, {"in", in}, {"out", out}, {"digest", lr.digest.hex()}});
  }
  return a;
}

std::vector<LabelRecord> labels_from(const json& j) {
  std::vector<LabelRecord> out;
  for (const auto& e : j) {
    LabelRecord lr;
    lr.label = label_from(e.at("label"));
    for (const auto& m : e.at("in")) lr.in.push_back(SourcedMessage{message_from(m), refs_from(m.at("src"))});
    for (const auto& m : e.at("out")) lr.out.push_back(message_from(m));
    lr.digest = Digest::from_hex(e.at("digest").get<std::string>());
    out.push_back(std::move(lr));
  }
  return out;
}

json header_json(const TraceHeader& h) {
  json byz = json::array();
  for (auto s : h.byzantine) byz.push_back(s.index);
  json reqs = json::array();
  for (const auto& r : h.requests) {
    reqs.push_back(json{{"step", r.step}, {"server", r.server.index}, {"label", label_json(r.label)},
                        {"p", to_hex(r.request.payload)}});
  }
  return json{{"schema", kTraceSchema}, {"n", h.n},         {"f", h.f},           {"seed", h.seed},
              {"horizon", h.horizon},   {"drain", h.drain}, {"byzantine", byz}, {"requests", reqs}};
}

TraceHeader header_from(const json& j) {
  if (j.at("schema").get<std::string>() != kTraceSchema) throw DecodeError("unsupported trace schema");
  TraceHeader h;
  h.n = j.at("n").get<std::uint32_t>();
  h.f = j.at("f").get<std::uint32_t>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.horizon = j.at("horizon").get<Step>();
  h.drain = j.at("drain").get<bool>();
  for (const auto& s : j.at("byzantine")) h.byzantine.insert(ServerId{s.get<std::uint32_t>()});
  for (const auto& r : j.at("requests")) {
    h.requests.push_back(ScheduledRequest{r.at("step").get<Step>(), ServerId{r.at("server").get<std::uint32_t>()},
                                          label_from(r.at("label")), Request{from_hex(r.at("p").get<std::string>())}});
  }
  return h;
}

json event_json(const TraceEvent& e) {
  json j{{"step", e.step}, {"ev", to_string(e.kind)}, {"server", e.server.index}};
  switch (e.kind) {
    case EventKind::kSend:
    case EventKind::kDeliver:
      j["peer"] = e.peer.index;
      j["wire"] = to_string(e.wire);
      if (e.kind == EventKind::kSend) j["at"] = e.deliver_step;
      if (e.ref) j["ref"] = e.ref->hex();
      break;
    case EventKind::kInsert:
    case EventKind::kPromote:
      j["block"] = block_json(*e.block, true);
      break;
    case EventKind::kFwdReq:
    case EventKind::kFwdResp:
      j["peer"] = e.peer.index;
      j["ref"] = e.ref->hex();
      break;
    case EventKind::kInterpret:
      j["block"] = block_json(*e.block, false);
      j["labels"] = labels_json(e.labels);
      j["skipped"] = e.skipped_requests;
      break;
    case EventKind::kIndicate:
      j["label"] = label_json(*e.label);
      j["ind"] = to_hex(e.indication.payload);
      j["for"] = e.on_behalf_of.index;
      j["surfaced"] = e.surfaced;
      break;
    case EventKind::kDrop:
      j["peer"] = e.peer.index;
      j["reason"] = e.reason;
      if (e.ref) j["ref"] = e.ref->hex();
      break;
    case EventKind::kEnd:
      j["drain_incomplete"] = e.drain_incomplete;
      break;
  }
  return j;
}

TraceEvent event_from(const json& j) {
  TraceEvent e;
  e.step = j.at("step").get<Step>();
  e.kind = event_kind_from_string(j.at("ev").get<std::string>());
  e.server = ServerId{j.at("server").get<std::uint32_t>()};
  if (j.contains("peer")) e.peer = ServerId{j.at("peer").get<std::uint32_t>()};
  if (j.contains("wire")) e.wire = wire_kind_from_string(j.at("wire").get<std::string>());
  if (j.contains("at")) e.deliver_step = j.at("at").get<Step>();
  if (j.contains("ref")) e.ref = BlockRef::from_hex(j.at("ref").get<std::string>());
  if (j.contains("block")) e.block = block_from(j.at("block"));
  if (j.contains("labels")) e.labels = labels_from(j.at("labels"));
  if (j.contains("skipped")) e.skipped_requests = j.at("skipped").get<std::uint64_t>();
  if (j.contains("label")) e.label = label_from(j.at("label"));
  if (j.contains("ind")) e.indication = Indication{from_hex(j.at("ind").get<std::string>())};
  if (j.contains("for")) e.on_behalf_of = ServerId{j.at("for").get<std::uint32_t>()};
  if (j.contains("surfaced")) e.surfaced = j.at("surfaced").get<bool>();
  if (j.contains("reason")) e.reason = j.at("reason").get<std::string>();
  if (j.contains("drain_incomplete")) e.drain_incomplete = j.at("drain_incomplete").get<bool>();
  if ((e.kind == EventKind::kInsert || e.kind == EventKind::kPromote || e.kind == EventKind::kInterpret) && !e.block) {
    throw DecodeError("event without block");
  }
  if ((e.kind == EventKind::kFwdReq || e.kind == EventKind::kFwdResp) && !e.ref) throw DecodeError("FWD event without ref");
  if (e.kind == EventKind::kIndicate && !e.label) throw DecodeError("INDICATE without label");
  return e;
}

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kEventNames) {
    if (kind == k) return name;
  }
  return "?";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kEventNames) {
    if (name == s) return kind;
  }
  throw DecodeError("unknown event kind " + std::string(s));
}

std::string_view to_string(WireKind k) {
  switch (k) {
    case WireKind::kBlock: return "BLOCK";
    case WireKind::kFwd: return "FWD";
    case WireKind::kRaw: return "RAW";
  }
  return "?";
}

WireKind wire_kind_from_string(std::string_view s) {
  if (s == "BLOCK") return WireKind::kBlock;
  if (s == "FWD") return WireKind::kFwd;
  if (s == "RAW") return WireKind::kRaw;
  throw DecodeError("unknown wire kind " + std::string(s));
}

BlockInfo block_info(const Block& b, const BlockRef& r) { return BlockInfo{r, b.builder, b.seq, b.preds, b.requests}; }

const TraceEvent* Trace::end() const {
  if (events.empty() || events.back().kind != EventKind::kEnd) return nullptr;
  return &events.back();
}

std::string to_json_line(const TraceHeader& h) { return header_json(h).dump(); }
std::string to_json_line(const TraceEvent& e) { return event_json(e).dump(); }

void write_trace(std::ostream& os, const Trace& t) {
  os << to_json_line(t.header) << '\n';
  for (const auto& e : t.events) os << to_json_line(e) << '\n';
}

std::string write_trace(const Trace& t) {
  std::ostringstream os;
  write_trace(os, t);
  return os.str();
}

Trace read_trace(std::istream& is) {
  Trace t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      if (!have_header) {
        t.header = header_from(j);
        have_header = true;
      } else {
        t.events.push_back(event_from(j));
      }
    } catch (const std::exception& ex) {
      throw DecodeError("trace line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return t;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_trace(in);
}

}  // namespace dagbft::sim
