#include "dagbft/sim/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dagbft/brb.hpp"
#include "dagbft/errors.hpp"

namespace dagbft::sim {

using nlohmann::json;

namespace {

constexpr std::pair<BehaviorKind, std::string_view> kBehaviorNames[] = {
    {BehaviorKind::kEquivocate, "EQUIVOCATE"},   {BehaviorKind::kSilent, "SILENT"},
    {BehaviorKind::kSelectiveSend, "SELECTIVE_SEND"}, {BehaviorKind::kGarbage, "GARBAGE"},
    {BehaviorKind::kCrashAt, "CRASH_AT"},        {BehaviorKind::kDuplicateRefs, "DUPLICATE_REFS"},
};

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Scenario from_json(const json& j) {
  Scenario s;
  s.size.n = j.at("n").get<std::uint32_t>();
  s.size.f = j.at("f").get<std::uint32_t>();
  s.seed = get_or<std::uint64_t>(j, "seed", 0);
  s.max_steps = get_or<Step>(j, "max_steps", s.max_steps);
  s.drain = get_or<bool>(j, "drain", s.drain);
  s.drain_cap = get_or<Step>(j, "drain_cap", s.drain_cap);
  s.every_k_steps = get_or<Step>(j, "every_k_steps", s.every_k_steps);
  s.adversary_budget = get_or<std::size_t>(j, "adversary_budget", s.adversary_budget);
  s.self_check = get_or<bool>(j, "self_check", s.self_check);
  if (j.contains("delay")) {
    s.min_delay = j.at("delay").at("min").get<Step>();
    s.max_delay = j.at("delay").at("max").get<Step>();
  }
  if (j.contains("signatures")) {
    auto name = j.at("signatures").get<std::string>();
    if (name == "ed25519") {
      s.scheme = SignatureScheme::kEd25519;
    } else if (name == "hmac") {
      s.scheme = SignatureScheme::kHmacSha256;
    } else {
      throw ConfigError("unknown signature scheme " + name);
    }
  }
  if (j.contains("gossip")) {
    const auto& g = j.at("gossip");
    s.gossip.max_rs_per_block = get_or<std::size_t>(g, "max_rs_per_block", s.gossip.max_rs_per_block);
    s.gossip.fwd_interval = get_or<Step>(g, "fwd_interval", s.gossip.fwd_interval);
    s.gossip.fwd_initial_wait = get_or<Step>(g, "fwd_initial_wait", s.gossip.fwd_initial_wait);
    s.gossip.max_pending_per_builder =
        get_or<std::size_t>(g, "max_pending_per_builder", s.gossip.max_pending_per_builder);
  }
  for (const auto& b : j.value("byzantine", json::array())) {
    ServerId id{b.at("server").get<std::uint32_t>()};
    BehaviorSpec spec;
    spec.kind = behavior_kind_from_string(b.at("kind").get<std::string>());
    spec.crash_step = get_or<Step>(b, "step", 0);
    for (const auto& v : b.value("victims", json::array())) spec.victims.push_back(ServerId{v.get<std::uint32_t>()});
    if (!s.byzantine.emplace(id, spec).second) throw ConfigError("server listed twice as byzantine");
  }
  for (const auto& r : j.value("requests", json::array())) {
    ScheduledRequest req;
    req.step = get_or<Step>(r, "step", 0);
    req.server = ServerId{r.at("server").get<std::uint32_t>()};
    req.label = Label{ServerId{r.at("label").at("originator").get<std::uint32_t>()},
                      r.at("label").at("nonce").get<std::uint64_t>()};
    if (r.contains("broadcast")) {
      req.request = brb::broadcast_request(r.at("broadcast").get<brb::Value>());
    } else {
      req.request = Request{from_hex(r.at("payload").get<std::string>())};
    }
    s.requests.push_back(std::move(req));
  }
  return s;
}

}  // namespace

std::string_view to_string(BehaviorKind k) {
  for (const auto& [kind, name] : kBehaviorNames) {
    if (kind == k) return name;
  }
  return "?";
}

BehaviorKind behavior_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kBehaviorNames) {
    if (name == s) return kind;
  }
  throw ConfigError("unknown behavior kind " + std::string(s));
}

void validate(const Scenario& s) {
  if (!s.size.well_formed()) {
    throw ConfigError("n must equal 3f + 1 (n=" + std::to_string(s.size.n) + ", f=" + std::to_string(s.size.f) + ")");
  }
  if (s.byzantine.size() > s.size.f) throw ConfigError("more byzantine servers than f");
  for (const auto& [id, spec] : s.byzantine) {
    if (id.index >= s.size.n) throw ConfigError("byzantine server id out of range");
    for (auto v : spec.victims) {
      if (v.index >= s.size.n) throw ConfigError("victim id out of range");
    }
  }
  if (s.min_delay == 0) throw ConfigError("min delay must be at least one step");
  if (s.min_delay > s.max_delay) throw ConfigError("min delay exceeds max delay");
  if (s.max_steps == 0) throw ConfigError("max_steps must be positive");
  if (s.every_k_steps == 0) throw ConfigError("every_k_steps must be positive");
  if (s.gossip.max_rs_per_block == 0) throw ConfigError("max_rs_per_block must be positive");
  if (s.gossip.fwd_interval == 0) throw ConfigError("fwd_interval must be positive");
  for (const auto& r : s.requests) {
    if (r.server.index >= s.size.n || r.label.originator.index >= s.size.n) {
      throw ConfigError("request names a server out of range");
    }
    if (r.step >= s.max_steps) throw ConfigError("request scheduled at or after max_steps");
  }
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  try {
    s = from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const DecodeError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  validate(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  json byz = json::array();
  for (const auto& [id, spec] : s.byzantine) {
    json b{{"server", id.index}, {"kind", to_string(spec.kind)}};
    if (spec.kind == BehaviorKind::kCrashAt) b["step"] = spec.crash_step;
    if (!spec.victims.empty()) {
      json v = json::array();
      for (auto x : spec.victims) v.push_back(x.index);
      b["victims"] = v;
    }
    byz.push_back(b);
  }
  json reqs = json::array();
  for (const auto& r : s.requests) {
    reqs.push_back(json{{"step", r.step},
                        {"server", r.server.index},
                        {"label", {{"originator", r.label.originator.index}, {"nonce", r.label.nonce}}},
                        {"payload", to_hex(r.request.payload)}});
  }
  json j{{"n", s.size.n},
         {"f", s.size.f},
         {"seed", s.seed},
         {"max_steps", s.max_steps},
         {"drain", s.drain},
         {"drain_cap", s.drain_cap},
         {"every_k_steps", s.every_k_steps},
         {"adversary_budget", s.adversary_budget},
         {"self_check", s.self_check},
         {"delay", {{"min", s.min_delay}, {"max", s.max_delay}}},
         {"signatures", s.scheme == SignatureScheme::kEd25519 ? "ed25519" : "hmac"},
         {"gossip",
          {{"max_rs_per_block", s.gossip.max_rs_per_block},
           {"fwd_interval", s.gossip.fwd_interval},
           {"fwd_initial_wait", s.gossip.fwd_initial_wait},
           {"max_pending_per_builder", s.gossip.max_pending_per_builder}}},
         {"byzantine", byz},
         {"requests", reqs}};
  return j.dump(2);
}

}  // namespace dagbft::sim
