#pragma once

// Scripted byzantine servers. Each one holds only its own signing handle.

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "dagbft/shim.hpp"
#include "dagbft/sim/scenario.hpp"

namespace dagbft::sim {

struct Outgoing {
  ServerId to;
  Bytes bytes;
  WireKind wire = WireKind::kBlock;
  std::optional<BlockRef> ref;
};

Outgoing outgoing(const Envelope& e);

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual void request(const Label& /*label*/, const Request& /*r*/) {}
  virtual std::vector<Outgoing> on_envelope(const Envelope& /*e*/, Step /*now*/) { return {}; }
  virtual std::vector<Outgoing> act(Step now) = 0;
};

struct AdversaryContext {
  ServerId self;
  SystemSize size;
  std::shared_ptr<const KeyRegistry> keys;
  SigningHandle handle;
  std::shared_ptr<const ProtocolFactory> factory;
  ShimConfig shim;
  std::uint64_t seed = 0;
  std::vector<ServerId> correct;  // ascending
};

std::unique_ptr<Adversary> make_adversary(const BehaviorSpec& spec, AdversaryContext ctx);

}  // namespace dagbft::sim
