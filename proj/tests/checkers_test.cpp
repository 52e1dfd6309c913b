#include <gtest/gtest.h>

#include "dagbft/brb.hpp"
#include "dagbft/sim/checkers.hpp"
#include "dagbft/sim/fixtures.hpp"
#include "dagbft/sim/simulator.hpp"
#include "support.hpp"

namespace dagbft::sim {
namespace {

Scenario two_labels() {
  Scenario s;
  s.seed = 5;
  s.max_steps = 15;
  s.requests.push_back({0, ServerId{0}, Label{ServerId{0}, 1}, brb::broadcast_request(42)});
  s.requests.push_back({1, ServerId{2}, Label{ServerId{2}, 1}, brb::broadcast_request(7)});
  return s;
}

TraceEvent indicate(ServerId s, Label l, brb::Value v) {
  TraceEvent e;
  e.kind = EventKind::kIndicate;
  e.server = s;
  e.on_behalf_of = s;
  e.surfaced = true;
  e.label = l;
  e.indication = brb::deliver_indication(v);
  return e;
}

// Inserts before the END event so drained() still holds.
void inject(Trace& t, TraceEvent e) {
  e.step = t.events.back().step;
  t.events.insert(t.events.end() - 1, std::move(e));
}

TEST(PointToPoint, CleanOnFixtureAndRun) {
  auto fixture = check_point_to_point(fixture_trace(fig4(false)));
  EXPECT_TRUE(fixture.ok()) << format_report(fixture);
  EXPECT_GT(fixture.checked, 0u);
  auto r = check_point_to_point(run(two_labels()));
  EXPECT_TRUE(r.ok()) << format_report(r);
  EXPECT_TRUE(r.notes.empty());
}

TEST(PointToPoint, DuplicatedReceiveIsOneViolation) {
  auto r = check_point_to_point(testkit::duplicated_receive_fixture());
  EXPECT_EQ(r.violations.size(), 1u) << format_report(r);
  EXPECT_EQ(r.count("no-duplication"), 1u);
}

TEST(PointToPoint, ForgedReceiveIsOneViolation) {
  auto r = check_point_to_point(testkit::forged_receive_fixture());
  EXPECT_EQ(r.violations.size(), 1u) << format_report(r);
  EXPECT_EQ(r.count("authenticity"), 1u);
}

TEST(PointToPoint, DroppedReceiveBreaksReliableDelivery) {
  const auto fx = fig4(false);
  Trace t = fixture_trace(fx);
  for (auto& e : t.events) {
    if (e.kind == EventKind::kInterpret && e.block->ref == fx.ref_of("B6")) e.labels.at(0).in.pop_back();
  }
  auto r = check_point_to_point(t);
  EXPECT_EQ(r.count("reliable-delivery"), 1u) << format_report(r);
}

TEST(Brb, CleanRun) {
  auto r = check_brb(run(two_labels()));
  EXPECT_TRUE(r.ok()) << format_report(r);
  EXPECT_EQ(r.checked, 2u);
}

TEST(Brb, DetectsEachProperty) {
  const Trace clean = run(two_labels());
  const Label l{ServerId{0}, 1};
  {
    Trace t = clean;
    inject(t, indicate(ServerId{1}, l, 42));
    EXPECT_EQ(check_brb(t).count("no-duplication"), 1u);
  }
  {
    Trace t = clean;
    inject(t, indicate(ServerId{1}, Label{ServerId{0}, 9}, 5));
    auto r = check_brb(t);
    EXPECT_EQ(r.count("integrity"), 1u);
    EXPECT_EQ(r.count("totality"), 3u);  // the other three never delivered it
  }
  {
    Trace t = clean;
    t.header.byzantine.insert(ServerId{3});
    inject(t, indicate(ServerId{1}, Label{ServerId{3}, 4}, 1));
    inject(t, indicate(ServerId{2}, Label{ServerId{3}, 4}, 2));
    auto r = check_brb(t);
    EXPECT_EQ(r.count("consistency"), 1u);
    EXPECT_EQ(r.count("integrity"), 0u);
  }
  {
    Trace t = clean;
    t.events.erase(std::remove_if(t.events.begin(), t.events.end(),
                                  [](const TraceEvent& e) {
                                    return e.kind == EventKind::kIndicate && e.server == ServerId{2} &&
                                           e.label == Label{ServerId{0}, 1};
                                  }),
                   t.events.end());
    auto r = check_brb(t);
    EXPECT_EQ(r.count("validity"), 1u);
    EXPECT_EQ(r.count("totality"), 1u);
  }
}

TEST(Brb, UndrainedRunsSkipLivenessWithANote) {
  Scenario s = two_labels();
  s.drain = false;
  s.max_steps = 2;
  s.requests.pop_back();
  auto r = check_brb(run(s));
  EXPECT_TRUE(r.ok());
  EXPECT_FALSE(r.notes.empty());
}

TEST(Convergence, CleanAndForged) {
  Trace t = run(two_labels());
  auto ok = check_convergence(t);
  EXPECT_TRUE(ok.ok()) << format_report(ok);
  EXPECT_EQ(ok.checked, default_snapshot_steps(t.header).size() * 16);

  // A block only s1 ever sees, at step 0.
  auto k = make_mac_keys(4, 1);
  Block b;
  b.builder = ServerId{3};
  b.requests.push_back({Label{ServerId{3}, 77}, brb::broadcast_request(1)});
  sign_block(b, *k.registry, k.handles[3]);
  TraceEvent e;
  e.kind = EventKind::kPromote;
  e.server = ServerId{1};
  e.block = block_info(b, ref(b));
  t.events.insert(t.events.begin(), e);
  auto bad = check_convergence(t, {0});
  // Fails for s0, s2, s3 against s1.
  EXPECT_EQ(bad.count("convergence"), 3u) << format_report(bad);
}

TEST(DigestAgreement, DetectsForgedDigest) {
  Trace t = run(two_labels());
  EXPECT_TRUE(check_digest_agreement(t).ok());
  for (auto& e : t.events) {
    if (e.kind == EventKind::kInterpret && e.server == ServerId{3} && !e.labels.empty()) {
      e.labels[0].digest.bytes[0] ^= 1;
      break;
    }
  }
  auto r = check_digest_agreement(t);
  // Compared against the first server that interpreted the block.
  EXPECT_EQ(r.count("digest-agreement"), 1u) << format_report(r);
}

TEST(SingleReference, DetectsRepeatsWithinAndAcrossBlocks) {
  Trace t = run(two_labels());
  EXPECT_TRUE(check_single_reference(t).ok());
  TraceEvent* first = nullptr;
  TraceEvent* later = nullptr;
  for (auto& e : t.events) {
    if (e.kind != EventKind::kInsert || e.server != ServerId{0} || e.block->preds.size() < 2) continue;
    (first ? later : first) = &e;
    if (later) break;
  }
  ASSERT_TRUE(first && later);
  Trace within = t;
  for (auto& e : within.events) {
    if (e.kind == EventKind::kInsert && e.block->ref == first->block->ref) e.block->preds.push_back(e.block->preds.back());
  }
  EXPECT_EQ(check_single_reference(within).count("single-reference"), 1u);
  later->block->preds.push_back(first->block->preds.back());
  EXPECT_EQ(check_single_reference(t).count("single-reference"), 1u);
}

TEST(Network, BalancedAndBroken) {
  Trace t = run(two_labels());
  auto ok = check_network(t);
  EXPECT_TRUE(ok.ok()) << format_report(ok);
  EXPECT_GT(ok.checked, 0u);
  for (auto& e : t.events) {
    if (e.kind == EventKind::kSend && e.server == ServerId{0} && e.peer == ServerId{1}) {
      e.peer = ServerId{2};
      break;
    }
  }
  auto bad = check_network(t);
  EXPECT_EQ(bad.count("deliver-without-send"), 1u);
  EXPECT_EQ(bad.count("undelivered"), 1u);
}

TEST(Census, FixtureArithmetic) {
  Census c = message_census(fixture_trace(fig4(false)));
  EXPECT_EQ(c.materialized_messages, 28u);
  EXPECT_EQ(c.distinct_blocks, 11u);
  EXPECT_EQ(c.correct_blocks, 3u);
  EXPECT_EQ(c.block_envelopes + c.fwd_envelopes + c.raw_envelopes + c.protocol_envelopes, 0u);
  EXPECT_EQ(message_census(fixture_trace(fig4(true))).delivered_broadcasts, 1u);
}

TEST(Census, RunHasOnlyBlocksAndFwds) {
  Trace t = run(two_labels());
  Census c = message_census(t);
  std::uint64_t sends = 0;
  for (const auto& e : t.events) sends += e.kind == EventKind::kSend;
  EXPECT_EQ(c.block_envelopes + c.fwd_envelopes, sends);
  EXPECT_EQ(c.protocol_envelopes, 0u);
  EXPECT_EQ(c.delivered_broadcasts, 2u);
  EXPECT_GE(c.materialized_messages, c.delivered_broadcasts);
  EXPECT_NE(format_census(c).find("materialized protocol messages: "), std::string::npos);
}

TEST(DagView, SnapshotsGrowMonotonically) {
  Trace t = run(two_labels());
  DagView early = dag_at(t, ServerId{1}, 3);
  DagView late = dag_at(t, ServerId{1});
  EXPECT_TRUE(extends(early.graph, late.graph));
  EXPECT_LT(early.blocks.size(), late.blocks.size());
  EXPECT_TRUE(extends(late.graph, union_view(t).graph));
  EXPECT_NE(to_dot(late).find("digraph"), std::string::npos);
}

}  // namespace
}  // namespace dagbft::sim
