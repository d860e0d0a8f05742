#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rac/graph.hpp"
#include "rac/numeric.hpp"
#include "rac/protocol.hpp"

namespace rac {

enum class ActionKind {
  Comply,
  Crash,
  SetSelfValue,
  TamperRelayed,
  InjectFakeId,
  DropRelayedEntry,
  FalselyAccuse,
  LieDeclaredDegree
};

enum class TamperMode { Set, Offset };

struct AttackAction {
  ActionKind kind = ActionKind::Comply;
  double value = 0;             // SetSelfValue (fixed), TamperRelayed amount
  bool random = false;          // SetSelfValue: draw a fresh value each round
  double low = -100, high = 100;
  NodeId target = 0;            // TamperRelayed, InjectFakeId, DropRelayedEntry, FalselyAccuse
  TamperMode mode = TamperMode::Offset;
  double gam_value = 0;         // InjectFakeId: γ part of the fake entry
  int degree = 0;               // LieDeclaredDegree
};

struct AttackScript {
  NodeId node = 0;
  std::vector<std::pair<int, AttackAction>> schedule;  // sorted by from_round
  std::optional<NodeId> collusion_partner;
};

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Comply: return "Comply";
    case ActionKind::Crash: return "Crash";
    case ActionKind::SetSelfValue: return "SetSelfValue";
    case ActionKind::TamperRelayed: return "TamperRelayed";
    case ActionKind::InjectFakeId: return "InjectFakeId";
    case ActionKind::DropRelayedEntry: return "DropRelayedEntry";
    case ActionKind::FalselyAccuse: return "FalselyAccuse";
    case ActionKind::LieDeclaredDegree: return "LieDeclaredDegree";
  }
  return "?";
}

inline ActionKind parse_action_kind(const std::string& s) {
  for (auto k : {ActionKind::Comply, ActionKind::Crash, ActionKind::SetSelfValue, ActionKind::TamperRelayed,
                 ActionKind::InjectFakeId, ActionKind::DropRelayedEntry, ActionKind::FalselyAccuse,
                 ActionKind::LieDeclaredDegree})
    if (s == to_string(k)) return k;
  throw ArgumentError("unknown attack action '" + s + "'");
}

// Entries sharing the latest from_round <= k; Comply before the first entry.
inline std::vector<AttackAction> active_actions(const AttackScript& script, int k) {
  std::optional<int> latest;
  for (const auto& [from, a] : script.schedule)
    if (from <= k && (!latest || from > *latest)) latest = from;
  if (!latest) return {AttackAction{}};
  std::vector<AttackAction> out;
  for (const auto& [from, a] : script.schedule)
    if (from == *latest) out.push_back(a);
  return out;
}

inline bool crashes_at(const AttackScript& script, int k) {
  for (const auto& a : active_actions(script, k))
    if (a.kind == ActionKind::Crash) return true;
  return false;
}

// Per-adversary stream; independent of how many other nodes draw.
inline std::mt19937_64 adversary_rng(std::uint64_t seed, NodeId node) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(node)};
  return std::mt19937_64(seq);
}

// State-level actions: the adversary bends its own update so the message it
// later broadcasts is self-consistent (a tampered relayed entry is also what
// its update consumed).
template <class S>
UpdateHooks<S> update_hooks(const AttackScript& script, std::mt19937_64& rng) {
  UpdateHooks<S> h;
  h.on_ledger = [&script](ValueMap<S>& ledger, int k) {
    for (const auto& a : active_actions(script, k)) {
      if (a.kind != ActionKind::TamperRelayed) continue;
      auto it = ledger.find(a.target);
      if (it == ledger.end()) continue;
      const S amount = from_double<S>(a.value);
      it->second.lam = a.mode == TamperMode::Set ? amount : S(it->second.lam + amount);
    }
  };
  h.on_mass = [&script, &rng](S& y, S& z, int k) {
    for (const auto& a : active_actions(script, k)) {
      if (a.kind != ActionKind::SetSelfValue) continue;
      double v = a.value;
      if (a.random) v = std::uniform_real_distribution<double>(a.low, a.high)(rng);
      y = from_double<S>(v) * z;
    }
  };
  return h;
}

// Message-level actions applied to the honest-looking Φ_j[k]. nullopt means
// the node sends nothing this round.
template <class S>
std::optional<InformationSet<S>> forge_information_set(const InformationSet<S>& truth, const AttackScript& script,
                                                       int k) {
  InformationSet<S> m = truth;
  for (const auto& a : active_actions(script, k)) {
    switch (a.kind) {
      case ActionKind::Crash:
        return std::nullopt;
      case ActionKind::InjectFakeId:
        m.relayed[a.target] = {from_double<S>(a.value), from_double<S>(a.gam_value)};
        break;
      case ActionKind::DropRelayedEntry:
        m.relayed.erase(a.target);
        break;
      case ActionKind::FalselyAccuse:
        m.detected.insert(a.target);
        break;
      case ActionKind::LieDeclaredDegree:
        m.declared_out_degree = a.degree;
        break;
      default:
        break;
    }
  }
  return m;
}

// For every script naming a collusion partner, gives the partner a matching
// TamperRelayed entry aimed back at it (same rounds, mode and amount) unless
// the partner already tampers with that target.
inline std::vector<AttackScript> mirror_collusion(std::vector<AttackScript> scripts) {
  std::map<NodeId, std::size_t> by_node;
  for (std::size_t a = 0; a < scripts.size(); ++a) by_node[scripts[a].node] = a;
  const std::size_t original = scripts.size();
  for (std::size_t a = 0; a < original; ++a) {
    if (!scripts[a].collusion_partner) continue;
    const NodeId self = scripts[a].node, partner = *scripts[a].collusion_partner;
    if (!by_node.count(partner)) {
      scripts.push_back({partner, {}, self});
      by_node[partner] = scripts.size() - 1;
    }
    auto& other = scripts[by_node[partner]];
    if (!other.collusion_partner) other.collusion_partner = self;
    auto copy = scripts[a].schedule;  // scripts may reallocate below
    for (const auto& [from, act] : copy) {
      if (act.kind != ActionKind::TamperRelayed || act.target != partner) continue;
      bool present = false;
      for (const auto& [f2, a2] : other.schedule)
        if (f2 == from && a2.kind == ActionKind::TamperRelayed && a2.target == self) present = true;
      if (present) continue;
      AttackAction mirrored = act;
      mirrored.target = self;
      other.schedule.emplace_back(from, mirrored);
    }
    std::stable_sort(other.schedule.begin(), other.schedule.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
  }
  return scripts;
}

inline NodeSet adversary_set(const std::vector<AttackScript>& scripts) {
  NodeSet out;
  for (const auto& s : scripts) out.insert(s.node);
  return out;
}

// A node every other node sends to.
inline bool is_full_access(const DirectedGraph& g, NodeId v) { return g.in_degree(v) == g.node_count() - 1; }

// Admissibility of the scripted adversary set. Informational only: runs may
// still be simulated when it fails.
inline ConditionReport validate_adversary_placement(const DirectedGraph& g, const std::vector<AttackScript>& scripts,
                                                    const AdversaryModel& model) {
  ConditionReport report;
  NodeSet adv;
  for (const auto& s : scripts) {
    if (!g.valid_node(s.node)) {
      report.violations.push_back({{s.node}, "adversary id in range", "invalid node id"});
      continue;
    }
    if (!adv.insert(s.node).second)
      report.violations.push_back({{s.node}, "one script per adversary", "duplicate script"});
  }
  if (model.kind == AdversaryKind::Total) {
    if (!is_f_total(adv, model.f))
      report.violations.push_back({{adv.begin(), adv.end()}, "f-total bound",
                                   std::to_string(adv.size()) + " adversaries > f=" + std::to_string(model.f)});
    return report;
  }
  // In a complete graph every node is full access; the exemption would then
  // admit any set, so it only applies when some node is not.
  bool all_full = true;
  for (NodeId i = 1; i <= g.node_count(); ++i) all_full = all_full && is_full_access(g, i);
  for (NodeId i = 1; i <= g.node_count(); ++i) {
    if (adv.count(i) || (!all_full && is_full_access(g, i))) continue;
    std::vector<NodeId> bad;
    for (NodeId j : g.in_neighbors(i))
      if (adv.count(j)) bad.push_back(j);
    if (static_cast<int>(bad.size()) > model.f) {
      bad.insert(bad.begin(), i);
      report.violations.push_back({bad, "f-local bound",
                                   "node " + std::to_string(i) + " has " + std::to_string(bad.size() - 1) +
                                       " adversarial in-neighbors"});
    }
  }
  return report;
}

}  // namespace rac
