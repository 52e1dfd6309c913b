#pragma once

#include <vector>

#include "dagbft/sim/scenario.hpp"

namespace dagbft::sim {

struct RandomScenarioOptions {
  std::vector<std::uint32_t> f_choices{1, 2};
  std::vector<BehaviorKind> kinds{BehaviorKind::kEquivocate,    BehaviorKind::kSilent,  BehaviorKind::kSelectiveSend,
                                  BehaviorKind::kGarbage,       BehaviorKind::kCrashAt, BehaviorKind::kDuplicateRefs};
  Step max_steps_f1 = 18;
  Step max_steps_f2 = 12;
  Step every_k_steps = 3;
  Step max_delay_cap = 4;
  std::uint32_t max_labels = 3;
  bool always_byzantine = false;  // at least one byzantine server
};

// Deterministic in (seed, options).
Scenario random_scenario(std::uint64_t seed, const RandomScenarioOptions& options = {});

}  // namespace dagbft::sim
