#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rac/adversary.hpp"
#include "rac/detection.hpp"
#include "rac/errors.hpp"
#include "rac/graph.hpp"
#include "rac/numeric.hpp"
#include "rac/protocol.hpp"

namespace rac {

enum class DetectionMode { None, Alg2, Alg3 };
enum class Arithmetic { Float, Exact };

inline const char* to_string(DetectionMode m) {
  switch (m) {
    case DetectionMode::None: return "None";
    case DetectionMode::Alg2: return "Alg2";
    case DetectionMode::Alg3: return "Alg3";
  }
  return "?";
}

// Values a golden scenario must reproduce.
struct Expectation {
  double target = 0;
  double target_tol = 1e-9;
  std::optional<double> final_value;  // defaults to target
  double final_tol = 1e-6;
};

struct Scenario {
  std::string name;
  DirectedGraph graph;
  std::vector<double> x0;
  int f = 1;
  AdversaryKind model = AdversaryKind::Local;
  DetectionMode detection = DetectionMode::Alg3;
  bool sharing_oracle = false;
  std::vector<AttackScript> adversaries;
  int horizon = 200;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::optional<std::pair<double, double>> safety_interval;
  Arithmetic arithmetic = Arithmetic::Float;
  ProtocolParams protocol;
  std::optional<Expectation> expect;
};

// Every problem with the scenario, not just the first.
inline std::vector<std::string> scenario_problems(const Scenario& sc) {
  std::vector<std::string> p;
  const int n = sc.graph.node_count();
  if (n < 1) p.push_back("graph has no nodes");
  if (static_cast<int>(sc.x0.size()) != n)
    p.push_back("x0 has " + std::to_string(sc.x0.size()) + " values for " + std::to_string(n) + " nodes");
  for (std::size_t a = 0; a < sc.x0.size(); ++a)
    if (!std::isfinite(sc.x0[a])) p.push_back("x0[" + std::to_string(a) + "] is not finite");
  if (sc.f < 0) p.push_back("f must be non-negative");
  if (sc.horizon < 1) p.push_back("horizon must be at least 1");
  if (!(sc.tol > 0)) p.push_back("tol must be positive");
  if (sc.detection == DetectionMode::Alg2) {
    if (!sc.sharing_oracle) p.push_back("Alg2 requires sharing_oracle = true");
    if (!sc.graph.is_undirected()) p.push_back("Alg2 requires an undirected graph");
  }
  if (sc.safety_interval && sc.safety_interval->first > sc.safety_interval->second)
    p.push_back("safety_interval lower bound exceeds upper bound");
  NodeSet seen;
  for (const auto& s : sc.adversaries) {
    if (!sc.graph.valid_node(s.node)) p.push_back("adversary id " + std::to_string(s.node) + " out of range");
    if (!seen.insert(s.node).second) p.push_back("duplicate script for node " + std::to_string(s.node));
    if (s.collusion_partner && !sc.graph.valid_node(*s.collusion_partner))
      p.push_back("collusion partner of node " + std::to_string(s.node) + " out of range");
    int last = -1;
    for (const auto& [from, a] : s.schedule) {
      if (from < last) p.push_back("schedule of node " + std::to_string(s.node) + " is not sorted");
      last = from;
      if (from < 0) p.push_back("schedule of node " + std::to_string(s.node) + " has a negative round");
      const bool needs_target = a.kind == ActionKind::TamperRelayed || a.kind == ActionKind::InjectFakeId ||
                                a.kind == ActionKind::DropRelayedEntry || a.kind == ActionKind::FalselyAccuse;
      if (needs_target && a.target < 1)
        p.push_back(std::string(to_string(a.kind)) + " of node " + std::to_string(s.node) + " needs a target");
      if (a.kind == ActionKind::SetSelfValue && a.random && !(a.low <= a.high))
        p.push_back("random range of node " + std::to_string(s.node) + " is empty");
    }
  }
  return p;
}

inline void validate(const Scenario& sc) {
  auto p = scenario_problems(sc);
  if (!p.empty()) throw ValidationError(std::move(p));
}

template <class S>
struct NodeRecord {
  S y{0}, z{0}, ratio{0};
  int detected_count = 0;
};

struct DetectionEvent {
  int round = 0;
  NodeId detector = 0;
  NodeId suspect = 0;
  Cause cause = Cause::Step1;
  bool operator==(const DetectionEvent&) const = default;
};

template <class S>
struct Trace {
  int n = 0;
  NodeSet adversaries;
  std::vector<std::vector<NodeRecord<S>>> rounds;  // rounds[k][i-1], k = 0..horizon
  std::vector<DetectionEvent> events;              // A / A^2 additions at normal nodes
  std::vector<DetectionVerdict> raw_verdicts;      // everything normal detectors raised
  std::vector<std::pair<int, NodeId>> low_mass;
  NodeSet never_detected;                          // N'
  int settle_round = 0;                            // k_c
  double target = 0;                               // mean of x0 over N'
  std::optional<int> converged_round;

  const NodeRecord<S>& at(int k, NodeId i) const { return rounds.at(k).at(i - 1); }
  int horizon() const { return static_cast<int>(rounds.size()) - 1; }
  bool is_normal(NodeId i) const { return !adversaries.count(i); }
};

// Smallest k with max over normal nodes of |r_i[k'] - target| < tol for all
// k' in [k, horizon].
template <class S>
std::optional<int> convergence_round(const Trace<S>& t, double target, double tol) {
  std::optional<int> first;
  for (int k = t.horizon(); k >= 0; --k) {
    bool ok = true;
    for (NodeId i = 1; i <= t.n && ok; ++i)
      if (t.is_normal(i) && !(std::fabs(to_double(t.at(k, i).ratio) - target) < tol)) ok = false;
    if (!ok) break;
    first = k;
  }
  return first;
}

template <class S>
std::vector<std::pair<S, S>> mass_sums(const Trace<S>& t, const NodeSet& nodes) {
  std::vector<std::pair<S, S>> out;
  out.reserve(t.rounds.size());
  for (int k = 0; k <= t.horizon(); ++k) {
    S y(0), z(0);
    for (NodeId i : nodes) {
      y += t.at(k, i).y;
      z += t.at(k, i).z;
    }
    out.emplace_back(y, z);
  }
  return out;
}

template <class S>
Trace<S> run(const Scenario& scenario) {
  validate(scenario);
  const DirectedGraph& g = scenario.graph;
  const int n = g.node_count();
  const auto scripts_vec = mirror_collusion(scenario.adversaries);
  std::map<NodeId, const AttackScript*> script;
  for (const auto& s : scripts_vec) script[s.node] = &s;
  std::map<NodeId, std::mt19937_64> rng;
  std::map<NodeId, UpdateHooks<S>> hooks;
  for (const auto& s : scripts_vec) rng.emplace(s.node, adversary_rng(scenario.seed, s.node));
  for (const auto& s : scripts_vec) hooks.emplace(s.node, update_hooks<S>(s, rng.at(s.node)));
  auto is_adv = [&](NodeId v) { return script.count(v) > 0; };

  DetectionParams dp;
  dp.f = scenario.f;
  dp.tol = scenario.protocol.eq_tol;
  dp.safety_interval = scenario.safety_interval;

  Trace<S> t;
  t.n = n;
  t.adversaries = adversary_set(scripts_vec);

  std::vector<NodeState<S>> st;
  st.reserve(n + 1);
  st.emplace_back();
  for (NodeId i = 1; i <= n; ++i) {
    st.push_back(bootstrap<S>(i, scenario.x0[i - 1], g));
    init_detection_state(st[i], g, scenario.f);
  }
  auto emit = [&](NodeId v, int k) -> std::optional<InformationSet<S>> {
    auto truth = build_information_set(st[v]);
    if (!is_adv(v)) return truth;
    return forge_information_set(truth, *script.at(v), k);
  };
  auto record = [&]() {
    std::vector<NodeRecord<S>> row(n);
    for (NodeId i = 1; i <= n; ++i)
      row[i - 1] = {st[i].run.y, st[i].run.z, st[i].run.ratio, static_cast<int>(st[i].detected.size())};
    t.rounds.push_back(std::move(row));
  };

  std::vector<std::optional<InformationSet<S>>> out(n + 1);
  for (NodeId v = 1; v <= n; ++v) out[v] = emit(v, 0);
  record();

  NodeSet shared;  // oracle state for Alg2
  NodeSet ever_detected;
  for (int k = 1; k <= scenario.horizon; ++k) {
    std::vector<Inbox<S>> inbox(n + 1);
    for (NodeId i = 1; i <= n; ++i)
      for (NodeId j : g.in_neighbors(i))
        if (out[j]) inbox[i].emplace(j, *out[j]);

    std::vector<DetectionOutput> det(n + 1);
    std::vector<std::map<NodeId, Cause>> cause_of(n + 1);
    std::vector<NodeSet> two_hop_before(n + 1);
    for (NodeId i = 1; i <= n; ++i) two_hop_before[i] = st[i].detected_two_hop;
    if (scenario.detection == DetectionMode::Alg3) {
      for (NodeId i = 1; i <= n; ++i) det[i] = detect_alg3(st[i], inbox[i], g, dp);
    } else if (scenario.detection == DetectionMode::Alg2) {
      NodeSet verified;
      for (NodeId i = 1; i <= n; ++i) {
        if (is_adv(i)) continue;
        det[i] = detect_alg2(st[i], inbox[i], g, dp);
        for (const auto& v : det[i].verdicts)
          if (is_adv(v.suspect)) verified.insert(v.suspect);
      }
      shared.insert(verified.begin(), verified.end());
      for (NodeId i = 1; i <= n; ++i) {
        NodeSet own = det[i].new_detected;
        det[i].new_detected.clear();
        for (NodeId m : shared)
          if (m != i && !st[i].detected.count(m)) {
            det[i].new_detected.insert(m);
            if (!own.count(m)) cause_of[i][m] = Cause::OracleShared;
          }
      }
    }
    for (NodeId i = 1; i <= n; ++i) {
      if (is_adv(i)) continue;
      for (const auto& v : det[i].verdicts) {
        t.raw_verdicts.push_back(v);
        cause_of[i].emplace(v.suspect, v.cause);
      }
    }

    for (NodeId i = 1; i <= n; ++i) {
      const NodeSet before = st[i].detected;
      const UpdateHooks<S>* h = is_adv(i) ? &hooks.at(i) : nullptr;
      auto r = honest_round(st[i], inbox[i], det[i].new_detected, g, scenario.protocol, h);
      if (r.low_mass) t.low_mass.emplace_back(k, i);
      if (scenario.detection != DetectionMode::None) store_round(st[i], inbox[i]);
      if (is_adv(i)) continue;
      for (NodeId m : st[i].detected)
        if (!before.count(m)) {
          auto c = cause_of[i].count(m) ? cause_of[i][m] : Cause::Crash;
          t.events.push_back({k, i, m, c});
          ever_detected.insert(m);
        }
      for (NodeId m : st[i].detected_two_hop)
        if (!two_hop_before[i].count(m)) {
          t.events.push_back({k, i, m, Cause::VoteMajority});
          ever_detected.insert(m);
        }
    }
    for (NodeId v = 1; v <= n; ++v) out[v] = emit(v, k);
    record();
  }

  double sum = 0;
  for (NodeId i = 1; i <= n; ++i)
    if (!ever_detected.count(i)) {
      t.never_detected.insert(i);
      sum += scenario.x0[i - 1];
    }
  t.target = t.never_detected.empty() ? 0.0 : sum / static_cast<double>(t.never_detected.size());
  for (const auto& e : t.events) t.settle_round = std::max(t.settle_round, e.round);
  t.converged_round = convergence_round(t, t.target, scenario.tol);
  return t;
}

}  // namespace rac
