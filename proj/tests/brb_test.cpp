#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dagbft/brb.hpp"
#include "dagbft/errors.hpp"
#include "support.hpp"

namespace dagbft::brb {
namespace {

const SystemSize kSize{4, 1};
const Label kLabel{ServerId{0}, 1};

Message msg(std::uint32_t from, std::uint32_t to, Kind kind, Value v) {
  return Message{ServerId{from}, ServerId{to}, encode({kind, v})};
}

std::vector<BrbMessage> kinds(const std::vector<Message>& out) {
  std::vector<BrbMessage> r;
  for (std::size_t i = 0; i < out.size(); i += 4) r.push_back(*decode_message(out[i].payload));
  return r;
}

TEST(BrbCodec, RoundTrip) {
  for (auto k : {Kind::kEcho, Kind::kReady}) {
    BrbMessage m{k, 0xDEADBEEFCAFEULL};
    EXPECT_EQ(decode_message(encode(m)), m);
  }
  EXPECT_EQ(decode_message(Bytes{3, 0, 0, 0, 0, 0, 0, 0, 1}), std::nullopt);
  EXPECT_EQ(decode_message(Bytes{1, 0}), std::nullopt);
  EXPECT_EQ(decode_broadcast(broadcast_request(9)), 9u);
  EXPECT_THROW(decode_broadcast(Request{{0xEE}}), ProtocolError);
  EXPECT_EQ(decode_deliver(deliver_indication(5)), 5u);
  EXPECT_EQ(decode_deliver(Indication{{2}}), std::nullopt);
}

TEST(BrbInstance, OriginatorBroadcastEchoesToAll) {
  BrbInstance pi(kLabel, ServerId{0}, kSize);
  auto out = pi.request(broadcast_request(42));
  ASSERT_EQ(out.size(), 4u);
  for (std::uint32_t i = 0; i < 4; ++i) {
    EXPECT_EQ(out[i], msg(0, i, Kind::kEcho, 42));
  }
  EXPECT_TRUE(pi.request(broadcast_request(42)).empty());
  EXPECT_TRUE(pi.request(broadcast_request(43)).empty());
}

TEST(BrbInstance, NonOriginatorBroadcastIsIgnored) {
  BrbInstance pi(kLabel, ServerId{2}, kSize);
  const Bytes before = pi.encode_state();
  EXPECT_TRUE(pi.request(broadcast_request(42)).empty());
  EXPECT_EQ(pi.encode_state(), before);
}

TEST(BrbInstance, UndecodableRequestLeavesStateUnchanged) {
  BrbInstance pi(kLabel, ServerId{0}, kSize);
  const Bytes before = pi.encode_state();
  EXPECT_THROW(pi.request(Request{{0xEE}}), ProtocolError);
  EXPECT_EQ(pi.encode_state(), before);
}

TEST(BrbInstance, WrongReceiverIsAContractViolation) {
  BrbInstance pi(kLabel, ServerId{1}, kSize);
  EXPECT_THROW(pi.receive(msg(0, 2, Kind::kEcho, 1)), ContractViolation);
}

TEST(BrbInstance, EchoRelayThenReadyAtQuorum) {
  BrbInstance pi(kLabel, ServerId{1}, kSize);
  auto out = pi.receive(msg(0, 1, Kind::kEcho, 42));
  EXPECT_EQ(kinds(out), (std::vector<BrbMessage>{{Kind::kEcho, 42}}));
  EXPECT_TRUE(pi.receive(msg(0, 1, Kind::kEcho, 42)).empty());  // same sender again
  EXPECT_TRUE(pi.receive(msg(1, 1, Kind::kEcho, 42)).empty());
  out = pi.receive(msg(2, 1, Kind::kEcho, 42));
  EXPECT_EQ(kinds(out), (std::vector<BrbMessage>{{Kind::kReady, 42}}));
  EXPECT_TRUE(pi.receive(msg(3, 1, Kind::kEcho, 42)).empty());
  EXPECT_TRUE(pi.take_indications().empty());
}

TEST(BrbInstance, ReadyAmplificationAndDelivery) {
  BrbInstance pi(kLabel, ServerId{3}, kSize);
  EXPECT_TRUE(pi.receive(msg(0, 3, Kind::kReady, 7)).empty());
  auto out = pi.receive(msg(1, 3, Kind::kReady, 7));
  EXPECT_EQ(kinds(out), (std::vector<BrbMessage>{{Kind::kReady, 7}}));
  EXPECT_TRUE(pi.take_indications().empty());
  EXPECT_TRUE(pi.receive(msg(2, 3, Kind::kReady, 7)).empty());
  auto ind = pi.take_indications();
  ASSERT_EQ(ind.size(), 1u);
  EXPECT_EQ(decode_deliver(ind[0]), 7u);
  pi.receive(msg(3, 3, Kind::kReady, 7));
  EXPECT_TRUE(pi.take_indications().empty());
  EXPECT_TRUE(pi.state().delivered);
}

TEST(BrbInstance, SplitValuesDoNotCombine) {
  BrbInstance pi(kLabel, ServerId{1}, kSize);
  pi.receive(msg(0, 1, Kind::kReady, 1));
  pi.receive(msg(2, 1, Kind::kReady, 2));
  EXPECT_FALSE(pi.state().readied);
  pi.receive(msg(3, 1, Kind::kReady, 1));
  EXPECT_TRUE(pi.state().readied);
  EXPECT_FALSE(pi.state().delivered);
}

TEST(BrbInstance, UnknownSenderAndGarbageIgnored) {
  BrbInstance pi(kLabel, ServerId{1}, kSize);
  const Bytes before = pi.encode_state();
  EXPECT_TRUE(pi.receive(msg(7, 1, Kind::kEcho, 1)).empty());
  EXPECT_TRUE(pi.receive(Message{ServerId{0}, ServerId{1}, {9, 9}}).empty());
  EXPECT_EQ(pi.encode_state(), before);
}

TEST(BrbInstance, CloneReplaysIdentically) {
  BrbInstance a(kLabel, ServerId{2}, kSize);
  a.receive(msg(0, 2, Kind::kEcho, 5));
  auto b = a.clone();
  std::vector<Message> in{msg(1, 2, Kind::kEcho, 5), msg(3, 2, Kind::kReady, 5), msg(1, 2, Kind::kReady, 5)};
  for (const auto& m : in) {
    EXPECT_EQ(a.receive(m), b->receive(m));
    EXPECT_EQ(a.state_digest(), b->state_digest());
  }
}

TEST(BrbInstance, StateEncodingCoversIdentity) {
  BrbInstance a(kLabel, ServerId{1}, kSize);
  BrbInstance b(kLabel, ServerId{2}, kSize);
  BrbInstance c(Label{ServerId{0}, 2}, ServerId{1}, kSize);
  EXPECT_NE(a.state_digest(), b.state_digest());
  EXPECT_NE(a.state_digest(), c.state_digest());
}

TEST(BrbFactory, CreatesFreshInstances) {
  BrbFactory f(kSize);
  auto pi = f.create(kLabel, ServerId{3});
  EXPECT_EQ(pi->server(), ServerId{3});
  EXPECT_EQ(pi->label(), kLabel);
  EXPECT_EQ(pi->state_digest(), BrbInstance(kLabel, ServerId{3}, kSize).state_digest());
}

TEST(MessageOrder, MatchesEncodingOrder) {
  std::mt19937_64 rng(5);
  std::vector<Message> ms;
  for (int i = 0; i < 200; ++i) {
    Bytes p(rng() % 4);
    for (auto& b : p) b = static_cast<std::uint8_t>(rng() % 3);
    ms.push_back(Message{ServerId{static_cast<std::uint32_t>(rng() % 3)},
                         ServerId{static_cast<std::uint32_t>(rng() % 3)}, p});
  }
  for (const auto& a : ms) {
    EXPECT_FALSE(message_less(a, a));
    for (const auto& b : ms) {
      EXPECT_EQ(message_less(a, b), canonical_encode(a) < canonical_encode(b));
    }
  }
}

TEST(MessageCodec, RoundTrip) {
  Message m = msg(2, 3, Kind::kReady, 11);
  EXPECT_EQ(dagbft::decode_message(canonical_encode(m)), m);
  EXPECT_THROW(dagbft::decode_message(Bytes{0, 0}), DecodeError);
}

TEST(BrbOracle, SingleValueUpToSix) {
  auto t = testkit::brb_oracle(6, {42});
  // 8 messages, all sequences of length 0..6.
  EXPECT_EQ(t.checked, 1u + 8 + 64 + 512 + 4096 + 32768 + 262144);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
}

TEST(BrbOracle, TwoValuesUpToFour) {
  auto t = testkit::brb_oracle(4, {1, 2});
  EXPECT_EQ(t.checked, 1u + 16 + 256 + 4096 + 65536);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
}

}  // namespace
}  // namespace dagbft::brb
