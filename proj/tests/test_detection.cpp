#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "rac/detection.hpp"
#include "rac/fixture_search.hpp"
#include "rac/fixtures.hpp"
#include "rac/sim.hpp"

using namespace rac;

namespace {

using VP = ValuePair<double>;

AttackScript script(NodeId node, int from, AttackAction a) { return {node, {{from, a}}, std::nullopt}; }

AttackAction act(ActionKind kind, NodeId target = 0, double value = 0) {
  AttackAction a;
  a.kind = kind;
  a.target = target;
  a.value = value;
  return a;
}

Scenario base(const DirectedGraph& g, std::vector<double> x0, DetectionMode mode, int f = 1) {
  Scenario sc;
  sc.graph = g;
  sc.x0 = std::move(x0);
  sc.f = f;
  sc.detection = mode;
  sc.sharing_oracle = mode == DetectionMode::Alg2;
  if (mode == DetectionMode::Alg2) sc.model = AdversaryKind::Total;
  sc.horizon = 60;
  return sc;
}

std::vector<DetectionEvent> events_against(const Trace<double>& t, NodeId suspect) {
  std::vector<DetectionEvent> out;
  for (const auto& e : t.events)
    if (e.suspect == suspect) out.push_back(e);
  return out;
}

NodeSet eventually_detected(const Trace<double>& t) {
  NodeSet s;
  for (const auto& e : t.events) s.insert(e.suspect);
  return s;
}

// Honest rational run keeping every broadcast and every λ per round.
struct History {
  std::vector<std::vector<InformationSet<Rational>>> msgs;  // msgs[r][j] = Φ_j[r]
  std::vector<std::vector<ValuePair<Rational>>> lam;        // lam[r][h] = (λ_h[r], γ_h[r])
};

History honest_history(const DirectedGraph& g, const std::vector<double>& x0, int rounds,
                       std::map<std::pair<int, NodeId>, NodeSet> inject = {}) {
  const int n = g.node_count();
  std::vector<NodeState<Rational>> st(1);
  for (NodeId i = 1; i <= n; ++i) st.push_back(bootstrap<Rational>(i, x0[i - 1], g));
  History h;
  auto snap = [&] {
    std::vector<InformationSet<Rational>> m(n + 1);
    std::vector<ValuePair<Rational>> l(n + 1);
    for (NodeId i = 1; i <= n; ++i) {
      m[i] = build_information_set(st[i]);
      l[i] = {st[i].run.lam, st[i].run.gam};
    }
    h.msgs.push_back(m);
    h.lam.push_back(l);
  };
  snap();
  for (int r = 1; r <= rounds; ++r) {
    const auto& prev = h.msgs.back();
    for (NodeId i = 1; i <= n; ++i) {
      Inbox<Rational> in;
      for (NodeId j : g.in_neighbors(i)) in.emplace(j, prev[j]);
      NodeSet nd = inject.count({r, i}) ? inject[{r, i}] : NodeSet{};
      honest_round(st[i], in, nd, g);
    }
    snap();
  }
  return h;
}

ReconstructionResult<Rational> replay(const History& h, const DirectedGraph& g, NodeId j, int r,
                                      std::optional<InformationSet<Rational>> now = std::nullopt) {
  ValueMap<Rational> in_now, in_prev;
  for (NodeId x : g.in_neighbors(j)) {
    in_now[x] = h.lam[r][x];
    in_prev[x] = h.lam[r - 1][x];
  }
  in_now[j] = h.lam[r][j];
  in_prev[j] = h.lam[r - 1][j];
  return reconstruct_running_sums(now.value_or(h.msgs[r][j]), h.msgs[r - 1][j], in_now, in_prev, g, 0.0);
}

}  // namespace

TEST(VoteValue, StrictMajority) {
  ValueReports<double> r{{1, VP{5, 1}}, {2, VP{5, 1}}, {3, VP{7, 1}}};
  int support = 0;
  auto v = vote_value(r, 1e-9, &support);
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, (VP{5, 1}));
  EXPECT_EQ(support, 2);
}

TEST(VoteValue, TieHasNoMajority) {
  ValueReports<double> r{{1, VP{5, 1}}, {2, VP{7, 1}}};
  EXPECT_FALSE(vote_value(r, 1e-9));
  EXPECT_FALSE(vote_value(ValueReports<double>{}, 1e-9));
}

TEST(VoteValue, GammaPartCounts) {
  ValueReports<double> r{{1, VP{5, 1}}, {2, VP{5, 2}}, {3, VP{5, 3}}};
  EXPECT_FALSE(vote_value(r, 1e-9));
}

TEST(VoteValue, HonestValueSurvivesEveryForgerPlacement) {
  const VP honest{3.25, 0.5};
  for (int f : {1, 2}) {
    const int m = 2 * f + 1;
    for (int mask = 0; mask < (1 << m); ++mask) {
      if (__builtin_popcount(mask) > f) continue;
      // Forgers either agree on one lie or each send their own.
      for (bool collude : {true, false}) {
        ValueReports<double> r;
        for (int a = 0; a < m; ++a) {
          if (mask >> a & 1) {
            r.emplace_back(a + 1, collude ? VP{99, 9} : VP{100.0 + a, 1});
          } else {
            r.emplace_back(a + 1, honest);
          }
        }
        auto v = vote_value(r, 1e-9);
        ASSERT_TRUE(v) << f << " " << mask;
        EXPECT_EQ(*v, honest);
      }
    }
  }
}

TEST(VoteIds, ThresholdIsFPlusOne) {
  auto two = vote_detection_ids({{1, {9}}, {2, {9}}, {3, {}}}, 1);
  EXPECT_EQ(two.accepted, NodeSet{9});
  EXPECT_TRUE(two.dissenters.empty());
  auto one = vote_detection_ids({{1, {9}}, {2, {}}, {3, {}}}, 1);
  EXPECT_TRUE(one.accepted.empty());
}

TEST(VoteIds, LoneAccuserOfVindicatedNodeIsDissenter) {
  auto vote = vote_detection_ids({{1, {9}}, {2, {}}, {3, {}}}, 1, {}, [](NodeId m) { return m == 9; });
  EXPECT_TRUE(vote.accepted.empty());
  EXPECT_EQ(vote.dissenters, NodeSet{1});
}

TEST(VoteIds, PositionedReporterOmittingAcceptedId) {
  auto vote = vote_detection_ids({{1, {9}}, {2, {9}}, {3, {}}, {4, {}}}, 1,
                                 [](NodeId reporter, NodeId) { return reporter == 3; });
  EXPECT_EQ(vote.accepted, NodeSet{9});
  EXPECT_EQ(vote.dissenters, NodeSet{3});
}

TEST(VoteIds, Empty) {
  auto vote = vote_detection_ids({}, 1);
  EXPECT_TRUE(vote.accepted.empty());
  EXPECT_TRUE(vote.dissenters.empty());
}

TEST(Reconstruction, HonestReplayIsExact) {
  auto g = fixtures::six_node();
  auto h = honest_history(g, {9, 7, 1, 3, 4, 6}, 8);
  for (int r = 1; r <= 8; ++r)
    for (NodeId j = 1; j <= 6; ++j) {
      auto res = replay(h, g, j, r);
      EXPECT_EQ(res.status, CheckStatus::Clean) << r << " " << j;
      EXPECT_EQ(res.eps_lam, Rational(0));
      EXPECT_EQ(res.eps_gam, Rational(0));
      EXPECT_TRUE(res.declarations_ok);
    }
}

TEST(Reconstruction, PerturbedSelfValueLeavesResidual) {
  auto g = fixtures::six_node();
  auto h = honest_history(g, {9, 7, 1, 3, 4, 6}, 5);
  auto forged = h.msgs[4][3];
  forged.self_next.lam += Rational(1);
  auto res = replay(h, g, 3, 4, forged);
  EXPECT_EQ(res.status, CheckStatus::Dirty);
  EXPECT_EQ(res.eps_lam, Rational(1));
  EXPECT_EQ(res.eps_gam, Rational(0));
}

TEST(Reconstruction, ZeroedDetectedInNeighborReplaysCleanly) {
  auto g = DirectedGraph::complete(4);
  // Node 2 removes node 4 at round 3.
  auto h = honest_history(g, {1, 2, 3, 10}, 6, {{{3, 2}, {4}}});
  ASSERT_TRUE(h.msgs[3][2].detected.count(4));
  ASSERT_EQ(h.msgs[3][2].relayed.at(4).lam, Rational(0));
  for (int r = 2; r <= 6; ++r) {
    auto res = replay(h, g, 2, r);
    EXPECT_EQ(res.status, CheckStatus::Clean) << r;
  }
  auto at3 = replay(h, g, 2, 3);
  EXPECT_EQ(at3.expected_removed_out, 1);
  EXPECT_EQ(at3.expected_out_degree, 2);
}

TEST(Reconstruction, MissingInputIsInconclusive) {
  auto g = fixtures::six_node();
  auto h = honest_history(g, {9, 7, 1, 3, 4, 6}, 4);
  ValueMap<Rational> in_now, in_prev;
  in_now[3] = h.lam[3][3];
  in_prev[3] = h.lam[2][3];
  auto res = reconstruct_running_sums(h.msgs[3][3], h.msgs[2][3], in_now, in_prev, g, 0.0);
  EXPECT_EQ(res.status, CheckStatus::Inconclusive);
  EXPECT_FALSE(res.missing.empty());
}

TEST(Reconstruction, WrongDeclaredDegreeIsDirty) {
  auto g = fixtures::six_node();
  auto h = honest_history(g, {9, 7, 1, 3, 4, 6}, 4);
  auto forged = h.msgs[3][3];
  forged.declared_out_degree += 1;
  auto res = replay(h, g, 3, 3, forged);
  EXPECT_EQ(res.status, CheckStatus::Dirty);
  EXPECT_FALSE(res.declarations_ok);
}

TEST(InitRange, Examples) {
  EXPECT_FALSE(init_range_check(15, std::make_pair(0.0, 20.0)));
  auto v = init_range_check(300, std::make_pair(0.0, 20.0));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->cause, Cause::InitRange);
  EXPECT_FALSE(init_range_check(1e9, std::nullopt));
}

TEST(InitRange, FlagsOutOfRangeNodeInRun) {
  auto sc = base(DirectedGraph::complete(4), {1, 2, 3, 400}, DetectionMode::Alg3);
  sc.safety_interval = std::make_pair(0.0, 20.0);
  sc.adversaries.push_back({4, {}, std::nullopt});
  auto t = run<double>(sc);
  auto ev = events_against(t, 4);
  ASSERT_EQ(ev.size(), 3u);
  for (const auto& e : ev) {
    EXPECT_EQ(e.round, 1);
    EXPECT_EQ(e.cause, Cause::InitRange);
  }
  for (NodeId i = 1; i <= 3; ++i) EXPECT_NEAR(t.at(t.horizon(), i).ratio, 2.0, 1e-9);
}

TEST(NoFalsePositives, AdversaryFreeRuns) {
  for (auto mode : {DetectionMode::Alg2, DetectionMode::Alg3}) {
    auto t = run<double>(base(fixtures::wheel5(), {8, 6, 1, 3, 9}, mode, mode == DetectionMode::Alg2 ? 2 : 1));
    EXPECT_TRUE(t.raw_verdicts.empty());
    EXPECT_TRUE(t.events.empty());
  }
  for (const auto& g : {fixtures::six_node(), fixtures::fourteen_node(), fixtures::eight_node()}) {
    std::vector<double> x0;
    for (NodeId i = 1; i <= g.node_count(); ++i) x0.push_back(i % 5 + 0.5 * i);
    auto t = run<double>(base(g, x0, DetectionMode::Alg3));
    EXPECT_TRUE(t.raw_verdicts.empty());
  }
}

TEST(Alg3, PinnedValueDetectedNextRoundByOutNeighbors) {
  auto g = fixtures::fourteen_node();
  auto sc = base(g, fixtures::fourteen_node_x0(), DetectionMode::Alg3);
  sc.adversaries.push_back(script(14, 4, act(ActionKind::SetSelfValue, 0, 20)));
  auto t = run<double>(sc);
  for (NodeId q : g.out_neighbors(14)) {
    bool at5 = false;
    for (const auto& e : events_against(t, 14)) at5 = at5 || (e.detector == q && e.round == 5);
    EXPECT_TRUE(at5) << "out-neighbor " << q;
  }
  for (const auto& v : t.raw_verdicts) EXPECT_EQ(v.suspect, 14);
}

TEST(Alg3, FullAccessNodeCatchesEveryAttacker) {
  auto g = fixtures::eight_node();
  auto sc = base(g, {3, 15, 9, 8, 4, 7, 1, 12}, DetectionMode::Alg3);
  for (NodeId a : {3, 4, 5, 6, 7}) {
    AttackAction r = act(ActionKind::SetSelfValue);
    r.random = true;
    sc.adversaries.push_back(script(a, 3, r));
  }
  sc.seed = 3;
  auto t = run<double>(sc);
  for (NodeId a : {3, 4, 5, 6, 7}) {
    bool by1 = false;
    for (const auto& e : events_against(t, a)) by1 = by1 || (e.detector == 1 && e.round == 4);
    EXPECT_TRUE(by1) << a;
  }
  for (const auto& v : t.raw_verdicts) EXPECT_GE(v.suspect, 3);
}

TEST(Alg3, FalseAccusationOfCleanNodeIsPunished) {
  auto g = DirectedGraph::complete(5);
  auto sc = base(g, {1, 2, 3, 4, 5}, DetectionMode::Alg3);
  sc.adversaries.push_back(script(5, 3, act(ActionKind::FalselyAccuse, 2)));
  auto t = run<double>(sc);
  EXPECT_TRUE(events_against(t, 2).empty());
  for (NodeId i = 1; i <= 4; ++i) {
    bool caught = false;
    for (const auto& e : events_against(t, 5)) caught = caught || (e.detector == i && e.round == 4);
    EXPECT_TRUE(caught) << i;
  }
}

TEST(Alg3, MessageForgeriesAreCaughtNextRound) {
  const std::vector<std::pair<AttackAction, Cause>> cases{
      {act(ActionKind::InjectFakeId, 6, 1.0), Cause::Step2},
      {act(ActionKind::DropRelayedEntry, 2), Cause::Step2},
      {act(ActionKind::TamperRelayed, 2, 0.5), Cause::Step3},
      {act(ActionKind::SetSelfValue, 0, 50), Cause::Step4},
      {act(ActionKind::LieDeclaredDegree, 0, 0), Cause::Step4},
  };
  // Node 4 cannot reach node 1 directly; 2, 3 and 5 relay for it.
  std::vector<Edge> e;
  for (NodeId a = 1; a <= 5; ++a)
    for (NodeId b = 1; b <= 5; ++b)
      if (a != b && !(a == 4 && b == 1) && !(a == 1 && b == 4)) e.emplace_back(a, b);
  DirectedGraph g(5, e, true);
  for (auto [a, cause] : cases) {
    if (a.kind == ActionKind::LieDeclaredDegree) a.degree = 1;
    auto sc = base(g, {1, 2, 3, 4, 5}, DetectionMode::Alg3);
    sc.adversaries.push_back(script(5, 4, a));
    auto t = run<double>(sc);
    for (NodeId i : g.out_neighbors(5)) {
      bool hit = false;
      for (const auto& ev : events_against(t, 5)) hit = hit || (ev.detector == i && ev.round == 5);
      EXPECT_TRUE(hit) << to_string(a.kind) << " at " << i;
    }
    bool right_cause = false;
    for (const auto& v : t.raw_verdicts) right_cause = right_cause || (v.suspect == 5 && v.cause == cause);
    EXPECT_TRUE(right_cause) << to_string(a.kind);
    for (const auto& v : t.raw_verdicts) EXPECT_EQ(v.suspect, 5) << to_string(a.kind);
    for (NodeId i = 1; i <= 4; ++i) EXPECT_NEAR(t.at(t.horizon(), i).ratio, 2.5, 1e-6);
  }
}

TEST(Alg3, CrashIsDetected) {
  auto sc = base(DirectedGraph::complete(4), {1, 2, 3, 4}, DetectionMode::Alg3);
  sc.adversaries.push_back(script(4, 5, act(ActionKind::Crash)));
  auto t = run<double>(sc);
  auto ev = events_against(t, 4);
  ASSERT_EQ(ev.size(), 3u);
  for (const auto& e : ev) {
    EXPECT_EQ(e.cause, Cause::Crash);
    EXPECT_EQ(e.round, 6);
  }
  for (NodeId i = 1; i <= 3; ++i) EXPECT_NEAR(t.at(t.horizon(), i).ratio, 2.0, 1e-6);
}

TEST(Alg3, DetectedSetsOnlyGrow) {
  auto sc = fixtures::fourteen_node_scenario(fixtures::fourteen_node(), true);
  auto t = run<double>(sc);
  for (NodeId i = 1; i <= 14; ++i)
    for (int k = 1; k <= t.horizon(); ++k) EXPECT_LE(t.at(k - 1, i).detected_count, t.at(k, i).detected_count);
}

TEST(Alg2, ArbitraryValuesDetectedAndSharedSameRound) {
  auto g = fixtures::wheel5();
  auto sc = base(g, {8, 6, 1, 3, 9}, DetectionMode::Alg2, 2);
  AttackAction r = act(ActionKind::SetSelfValue);
  r.random = true;
  sc.adversaries.push_back(script(5, 4, r));
  sc.adversaries.push_back({4, {}, std::nullopt});
  auto t = run<double>(sc);
  auto ev = events_against(t, 5);
  NodeSet direct, shared;
  for (const auto& e : ev) {
    EXPECT_EQ(e.round, 5);
    (e.cause == Cause::OracleShared ? shared : direct).insert(e.detector);
  }
  EXPECT_EQ(direct, (NodeSet{1, 2}));
  EXPECT_EQ(shared, NodeSet{3});
  for (NodeId i = 1; i <= 3; ++i) EXPECT_NEAR(t.at(t.horizon(), i).ratio, 4.5, 1e-6);
}

TEST(Alg2, DeclaredSetMismatchIsStep1) {
  auto sc = base(fixtures::wheel5(), {8, 6, 1, 3, 9}, DetectionMode::Alg2, 2);
  sc.adversaries.push_back(script(5, 4, act(ActionKind::FalselyAccuse, 3)));
  auto t = run<double>(sc);
  ASSERT_FALSE(t.raw_verdicts.empty());
  for (const auto& v : t.raw_verdicts) {
    EXPECT_EQ(v.suspect, 5);
    EXPECT_EQ(v.cause, Cause::Step1);
    EXPECT_EQ(v.round, 5);
  }
}

TEST(Alg2, CollusionCaughtByCommonNormalNeighbor) {
  auto g = fixtures::wheel5();
  ASSERT_TRUE(check_alg2_condition(g, NodeSet{4, 5}).satisfied());
  auto sc = base(g, {8, 6, 1, 3, 9}, DetectionMode::Alg2, 2);
  AttackScript s = script(4, 6, act(ActionKind::TamperRelayed, 5, 2.0));
  s.collusion_partner = 5;
  sc.adversaries.push_back(s);
  auto t = run<double>(sc);
  EXPECT_EQ(eventually_detected(t), (NodeSet{4, 5}));
  bool step3 = false;
  for (const auto& v : t.raw_verdicts) {
    step3 = step3 || (v.detector == 1 && v.cause == Cause::Step3 && v.round == 7);
    EXPECT_TRUE(v.suspect == 4 || v.suspect == 5);
  }
  EXPECT_TRUE(step3);
  for (NodeId i = 1; i <= 3; ++i) EXPECT_NEAR(t.at(t.horizon(), i).ratio, 5.0, 1e-6);
}

TEST(Agreement, SameDetectionsUnderBothAlgorithms) {
  auto g = DirectedGraph::complete(5);
  ASSERT_TRUE(check_alg3_condition(g, 2).satisfied());
  ASSERT_TRUE(check_alg2_condition(g, 2).satisfied());
  const std::vector<std::vector<AttackScript>> attacks{
      {script(5, 3, act(ActionKind::SetSelfValue, 0, 40))},
      {script(4, 3, act(ActionKind::TamperRelayed, 1, 1.0)), script(5, 6, act(ActionKind::InjectFakeId, 2, 3.0))},
      {script(2, 2, act(ActionKind::DropRelayedEntry, 3))},
  };
  for (const auto& adv : attacks) {
    auto s2 = base(g, {4, 8, 15, 16, 23}, DetectionMode::Alg2, 2);
    auto s3 = base(g, {4, 8, 15, 16, 23}, DetectionMode::Alg3, 2);
    s2.adversaries = s3.adversaries = adv;
    EXPECT_EQ(eventually_detected(run<double>(s2)), eventually_detected(run<double>(s3)));
  }
}
