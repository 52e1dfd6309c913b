#include "dagbft/sim/generate.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "dagbft/brb.hpp"

namespace dagbft::sim {

Scenario random_scenario(std::uint64_t seed, const RandomScenarioOptions& o) {
  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t n) { return n == 0 ? 0 : rng() % n; };

  Scenario s;
  s.seed = seed;
  s.size.f = o.f_choices[below(o.f_choices.size())];
  s.size.n = 3 * s.size.f + 1;
  s.max_steps = s.size.f == 1 ? o.max_steps_f1 : o.max_steps_f2;
  s.every_k_steps = o.every_k_steps;
  s.min_delay = 1;
  s.max_delay = 1 + below(o.max_delay_cap);

  std::vector<std::uint32_t> ids(s.size.n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::size_t byz = below(s.size.f + 1);
  if (o.always_byzantine && byz == 0) byz = 1;
  for (std::size_t i = 0; i < byz; ++i) {
    BehaviorSpec spec;
    spec.kind = o.kinds[below(o.kinds.size())];
    if (spec.kind == BehaviorKind::kCrashAt) spec.crash_step = 1 + below(s.max_steps - 1);
    s.byzantine.emplace(ServerId{ids[i]}, spec);
  }
  for (auto& [id, spec] : s.byzantine) {
    if (spec.kind != BehaviorKind::kSelectiveSend) continue;
    for (auto c : ids) {
      if (s.correct(ServerId{c})) {
        spec.victims.push_back(ServerId{c});
        break;
      }
    }
  }

  const std::uint32_t labels = 1 + static_cast<std::uint32_t>(below(o.max_labels));
  for (std::uint32_t l = 0; l < labels; ++l) {
    ScheduledRequest r;
    r.server = ServerId{static_cast<std::uint32_t>(below(s.size.n))};
    r.label = Label{r.server, l + 1};
    r.step = below(s.max_steps / 2);
    r.request = brb::broadcast_request(below(1000));
    s.requests.push_back(r);
    // Occasionally someone else tries to broadcast on the same label.
    if (below(4) == 0) {
      r.server = ServerId{static_cast<std::uint32_t>(below(s.size.n))};
      r.request = brb::broadcast_request(below(1000));
      s.requests.push_back(r);
    }
  }
  return s;
}

}  // namespace dagbft::sim
