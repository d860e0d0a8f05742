#pragma once

// Constrained searches that produced the frozen fixtures. Both are
// deterministic: candidates are visited in a fixed order and the first one
// meeting every requirement is returned.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rac/adversary.hpp"
#include "rac/fixtures.hpp"
#include "rac/graph.hpp"
#include "rac/sim.hpp"

namespace rac::fixtures {

inline std::vector<double> six_node_x0() { return {9, 7, 1, 3, 4, 6}; }

// Node 6 follows the protocol until round 2, then inflates its relayed copy
// of node 2's running sum.
inline Scenario six_node_scenario(const DirectedGraph& g) {
  Scenario sc;
  sc.name = "six_node_tamper";
  sc.graph = g;
  sc.x0 = six_node_x0();
  sc.f = 1;
  sc.detection = DetectionMode::Alg3;
  AttackAction a;
  a.kind = ActionKind::TamperRelayed;
  a.target = 2;
  a.value = 5;
  sc.adversaries.push_back({6, {{3, a}}, std::nullopt});
  return sc;
}

struct SixNodeProfile {
  // Full graph.
  bool converges = false;        // nodes 1..5 end within 1e-6 of 4.8
  bool detected_next_round = false;  // every out-neighbor of 6 removes it at round 4
  bool clean = false;            // no verdict names a normal node
  // Reduced graph.
  bool two_and_four_flag = false;
  bool no_vote_on_six = false;   // 1, 3, 5 never detect 6 through voting
  bool misled = false;           // one of 1, 3, 5 ends > 0.1 away from 4.8

  bool full_ok() const { return converges && detected_next_round && clean; }
  bool reduced_ok() const { return two_and_four_flag && no_vote_on_six && misled; }
};

inline SixNodeProfile six_node_profile(const DirectedGraph& full, const DirectedGraph& reduced) {
  SixNodeProfile p;
  const double want = 4.8;
  const auto t = run<double>(six_node_scenario(full));
  p.converges = true;
  for (NodeId i = 1; i <= 5; ++i)
    if (std::fabs(t.at(t.horizon(), i).ratio - want) > 1e-6) p.converges = false;
  p.detected_next_round = true;
  for (NodeId q : full.out_neighbors(6)) {
    bool found = false;
    for (const auto& e : t.events)
      if (e.detector == q && e.suspect == 6 && e.round == 4) found = true;
    if (!found) p.detected_next_round = false;
  }
  p.clean = std::all_of(t.raw_verdicts.begin(), t.raw_verdicts.end(),
                        [](const DetectionVerdict& v) { return v.suspect == 6; });

  const auto r = run<double>(six_node_scenario(reduced));
  bool v2 = false, v4 = false;
  for (const auto& v : r.raw_verdicts) {
    v2 = v2 || (v.detector == 2 && v.suspect == 6);
    v4 = v4 || (v.detector == 4 && v.suspect == 6);
  }
  p.two_and_four_flag = v2 && v4;
  p.no_vote_on_six = true;
  for (const auto& e : r.events)
    if ((e.detector == 1 || e.detector == 3 || e.detector == 5) && e.suspect == 6 && e.cause == Cause::VoteMajority)
      p.no_vote_on_six = false;
  for (NodeId i : {1, 3, 5})
    if (std::fabs(r.at(r.horizon(), i).ratio - want) > 0.1) p.misled = true;
  return p;
}

struct SixNodeHit {
  std::vector<Edge> edges;
  long candidates = 0;  // graphs that passed the structural filters
};

// Fixed: the undirected pairs (1,4), (2,5), (3,6) and 6 -> {1,2,4,5}. Banned:
// 2 -> 1 and 2 -> 3. Other ordered pairs are free; fewer edges are tried first.
inline std::optional<SixNodeHit> search_six_node() {
  std::vector<Edge> fixed;
  for (auto [a, b] : six_node_matching()) {
    fixed.emplace_back(a, b);
    fixed.emplace_back(b, a);
  }
  for (NodeId q : {1, 2, 4, 5}) fixed.emplace_back(6, q);
  const std::vector<Edge> banned{{2, 1}, {2, 3}};
  auto contains = [](const std::vector<Edge>& v, Edge e) { return std::find(v.begin(), v.end(), e) != v.end(); };
  std::vector<Edge> free_edges;
  for (NodeId a = 1; a <= 6; ++a)
    for (NodeId b = 1; b <= 6; ++b)
      if (a != b && !contains(fixed, {a, b}) && !contains(banned, {a, b})) free_edges.emplace_back(a, b);

  const int m = static_cast<int>(free_edges.size());
  SixNodeHit hit;
  for (int count = 0; count <= m; ++count) {
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      if (std::popcount(mask) != count) continue;
      std::vector<Edge> e = fixed;
      for (int t = 0; t < m; ++t)
        if (mask >> t & 1u) e.push_back(free_edges[t]);
      std::sort(e.begin(), e.end());
      const DirectedGraph g(6, e, false);
      if (!min_in_degree_ok(g, 1) || !check_alg3_condition(g, 1).satisfied()) continue;
      const DirectedGraph r(6, without_matching(e), false);
      if (check_alg3_condition(r, 1).satisfied() || !is_k_strongly_connected(g, 2)) continue;
      ++hit.candidates;
      const auto p = six_node_profile(g, r);
      if (p.full_ok() && p.reduced_ok()) {
        hit.edges = std::move(e);
        return hit;
      }
    }
  }
  return std::nullopt;
}

inline std::vector<double> fourteen_node_x0() { return {11, 2, 9, 3, 2, 10, 1, 4, 6, 9, 7, 5, 14, 8}; }

// Node 14 pins its value from round 4; node 2 tampers with the copy of its
// first in-neighbor's running sum from round 11.
inline Scenario fourteen_node_scenario(const DirectedGraph& g, bool attack) {
  Scenario sc;
  sc.name = attack ? "fourteen_node_attack" : "fourteen_node_clean";
  sc.graph = g;
  sc.x0 = fourteen_node_x0();
  sc.f = 1;
  if (!attack) return sc;
  AttackAction pin;
  pin.kind = ActionKind::SetSelfValue;
  pin.value = 20;
  AttackAction tamper;
  tamper.kind = ActionKind::TamperRelayed;
  tamper.target = g.in_neighbors(2).front();
  tamper.value = 5;
  sc.adversaries.push_back({2, {{11, tamper}}, std::nullopt});
  sc.adversaries.push_back({14, {{4, pin}}, std::nullopt});
  return sc;
}

struct FourteenNodeHit {
  std::vector<int> sizes;
  LayerVariant variant = LayerVariant::DirectedWrap;
};

// Layer sizes (each at least 2, summing to 14, at least 4 layers) in
// lexicographic order, directed variant first.
inline std::optional<FourteenNodeHit> search_fourteen_node() {
  const NodeSet adv{2, 14};
  const double mid = 83.0 / 13.0;
  std::vector<std::vector<int>> partitions;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int left) -> void {
    if (left == 0) {
      if (cur.size() >= 4) partitions.push_back(cur);
      return;
    }
    for (int s = 2; s <= left; ++s) {
      cur.push_back(s);
      self(self, left - s);
      cur.pop_back();
    }
  };
  rec(rec, 14);
  std::sort(partitions.begin(), partitions.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a > b;
  });
  for (auto variant : {LayerVariant::DirectedWrap, LayerVariant::UndirectedPath}) {
    for (const auto& sizes : partitions) {
      DirectedGraph g;
      try {
        g = generate_layered_sizes(sizes, variant);
      } catch (const ArgumentError&) {
        continue;
      }
      if (!check_alg3_condition(g, 1).satisfied() || !is_f_local(g, adv, 1) || !is_k_strongly_connected(g, 2))
        continue;
      const auto clean = run<double>(fourteen_node_scenario(g, false));
      bool ok = true;
      for (NodeId i = 1; i <= 14; ++i) ok = ok && std::fabs(clean.at(clean.horizon(), i).ratio - 6.5) < 1e-6;
      if (!ok) continue;
      const auto t = run<double>(fourteen_node_scenario(g, true));
      for (NodeId i = 1; i <= 14; ++i) {
        if (adv.count(i)) continue;
        ok = ok && std::fabs(t.at(10, i).ratio - mid) < 0.1 && std::fabs(t.at(t.horizon(), i).ratio - 6.75) < 1e-6;
      }
      for (const auto& v : t.raw_verdicts) ok = ok && adv.count(v.suspect);
      if (ok) return FourteenNodeHit{sizes, variant};
    }
  }
  return std::nullopt;
}

}  // namespace rac::fixtures
