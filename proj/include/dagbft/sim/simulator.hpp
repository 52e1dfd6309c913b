#pragma once

// Deterministic discrete-event network. Per step: inject requests, deliver
// due envelopes, tick every server in id order. Delays are drawn from a
// std::mt19937_64 seeded with the scenario seed as
// min_delay + rng() % (max_delay - min_delay + 1). Envelopes due at the same
// step are delivered ordered by (receiver, sender, send step, SHA-256 of the
// bytes, send order).

#include <map>
#include <memory>
#include <random>
#include <set>
#include <tuple>

#include "dagbft/shim.hpp"
#include "dagbft/sim/adversary.hpp"
#include "dagbft/sim/scenario.hpp"
#include "dagbft/sim/trace.hpp"

namespace dagbft::sim {

struct SimStats {
  Step final_step = 0;
  bool drain_incomplete = false;
  std::uint64_t envelopes = 0;
  std::map<ServerId, std::uint64_t> own_blocks;  // correct servers only
};

class Simulator {
 public:
  // A null factory means the BRB reference protocol.
  explicit Simulator(Scenario scenario, std::shared_ptr<const ProtocolFactory> factory = nullptr);
  ~Simulator();

  // Runs once; later calls return the same trace.
  const Trace& run();

  const Scenario& scenario() const { return scenario_; }
  const Trace& trace() const { return trace_; }
  const SimStats& stats() const { return stats_; }
  const std::shared_ptr<const KeyRegistry>& keys() const { return keys_; }
  const std::shared_ptr<const ProtocolFactory>& factory() const { return factory_; }
  // Throws ContractViolation for byzantine ids.
  const Shim& shim(ServerId s) const;

 private:
  struct InFlight {
    Step deliver = 0;
    ServerId to;
    ServerId from;
    Step sent = 0;
    Digest hash;
    std::uint64_t seq = 0;
    Bytes bytes;

    auto key() const { return std::tie(deliver, to, from, sent, hash, seq); }
    bool operator<(const InFlight& o) const { return key() < o.key(); }
  };

  void send(Step now, ServerId from, Outgoing o);
  void deliver(Step now, const InFlight& f);
  void record_tick(Step now, ServerId s, const TickResult& res);
  bool drained() const;
  void emit(TraceEvent e) { trace_.events.push_back(std::move(e)); }

  Scenario scenario_;
  std::shared_ptr<const ProtocolFactory> factory_;
  std::shared_ptr<const KeyRegistry> keys_;
  std::map<ServerId, std::unique_ptr<Shim>> shims_;
  std::map<ServerId, std::unique_ptr<Adversary>> adversaries_;
  std::map<ServerId, std::deque<Outgoing>> outbox_;
  std::set<InFlight> inflight_;
  std::mt19937_64 rng_;
  std::uint64_t seq_ = 0;
  bool ran_ = false;
  Trace trace_;
  SimStats stats_;
};

// Convenience: run a scenario and return its trace.
Trace run(const Scenario& s);

}  // namespace dagbft::sim
