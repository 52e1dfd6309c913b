#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dagbft/crypto.hpp"
#include "dagbft/gossip.hpp"
#include "dagbft/sim/trace.hpp"

namespace dagbft::sim {

enum class BehaviorKind {
  kEquivocate,
  kSilent,
  kSelectiveSend,
  kGarbage,
  kCrashAt,
  kDuplicateRefs,
};

std::string_view to_string(BehaviorKind k);
// Throws ConfigError.
BehaviorKind behavior_kind_from_string(std::string_view s);

struct BehaviorSpec {
  BehaviorKind kind = BehaviorKind::kSilent;
  Step crash_step = 0;              // kCrashAt
  std::vector<ServerId> victims;    // kSelectiveSend; empty means the lowest correct id
};

struct Scenario {
  SystemSize size;
  std::map<ServerId, BehaviorSpec> byzantine;
  Step min_delay = 1;
  Step max_delay = 3;
  std::uint64_t seed = 0;
  std::vector<ScheduledRequest> requests;
  Step max_steps = 30;  // also the byzantine horizon
  bool drain = true;
  Step drain_cap = 2000;  // extra steps before a drain is declared incomplete
  Step every_k_steps = 3;
  GossipConfig gossip;
  std::size_t adversary_budget = 4;  // envelopes per byzantine server per step
  SignatureScheme scheme = SignatureScheme::kHmacSha256;
  bool self_check = false;

  bool correct(ServerId s) const { return s.index < size.n && !byzantine.contains(s); }
};

// Throws ConfigError naming the broken invariant.
void validate(const Scenario& s);

// JSON scenario text; throws ConfigError (validation included).
Scenario parse_scenario(std::string_view text);
// Throws IoError or ConfigError.
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_json(const Scenario& s);

}  // namespace dagbft::sim
