#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dagbft/brb.hpp"
#include "dagbft/sim/simulator.hpp"

namespace dagbft::testkit {

struct Tally {
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::vector<std::string> notes;  // first few failures

  void fail(std::string note) {
    ++failures;
    if (notes.size() < 5) notes.push_back(std::move(note));
  }
  void absorb(const Tally& o) {
    checked += o.checked;
    failures += o.failures;
    for (const auto& n : o.notes) {
      if (notes.size() < 5) notes.push_back(n);
    }
  }
  bool ok() const { return failures == 0; }
};

// The broadcast fixture interpreted by one observer: exact in/out buffers
// per block, 28 materialized messages, and with the extended round one
// delivery of 42 on behalf of every server.
Tally fig4_exact();

// Random vertex-insert sequences on Digraph<int>: idempotence, extension
// and acyclicity after every step. `checked` counts inserts.
Tally insert_lemma(std::uint64_t seed, std::size_t sequences, std::size_t length = 20);

// Tries every way the BlockDag API offers to close a cycle. `checked`
// counts attempts; each blocked attempt is a pass.
Tally cycle_attack();

// Feeds every sequence of (kind, value, sender) messages up to `max_len`
// into a fresh n=4, f=1 BRB instance and compares each step's outputs and
// deliveries against a prefix-counting oracle. `checked` counts sequences.
Tally brb_oracle(std::size_t max_len, const std::vector<brb::Value>& values);

// For every correct server of a finished run: least-ref vs random-order
// interpretation of its final dag, and of a prefix dag G vs the final dag
// G' >= G. Compares state_digest on every shared (block, label).
// `checked` counts compared pairs.
Tally interpretation_determinism(const sim::Simulator& sim, std::uint64_t picker_seed);

// Runs random scenarios from `first_seed` upward, keeping those whose
// run stays within `max_blocks` distinct blocks, until `count` are kept.
std::vector<std::unique_ptr<sim::Simulator>> bounded_runs(std::size_t count, std::uint64_t first_seed,
                                                          std::size_t max_blocks);

// Trace of the broadcast fixture with one receive entry of an own block
// listed twice. Exactly one no-duplication violation.
sim::Trace duplicated_receive_fixture();

// Same trace with an extra receive entry that no referenced block sent.
// Exactly one authenticity violation.
sim::Trace forged_receive_fixture();

// Count of FWD_REQ events in a trace.
std::size_t fwd_requests(const sim::Trace& t);

}  // namespace dagbft::testkit
