#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "rac/errors.hpp"
#include "rac/graph.hpp"
#include "rac/numeric.hpp"

namespace rac {

// (λ, γ) or (δ, ω): a y-side and z-side running sum travelling together.
template <class S>
struct ValuePair {
  S lam{0};
  S gam{0};
  bool operator==(const ValuePair&) const = default;
};

template <class S>
bool same_pair(const ValuePair<S>& a, const ValuePair<S>& b, double tol) {
  return same_value(a.lam, b.lam, tol) && same_value(a.gam, b.gam, tol);
}

template <class S>
using ValueMap = std::map<NodeId, ValuePair<S>>;

// Φ_i[k]. `self_next` is (λ_i[k+1], γ_i[k+1]); `relayed` holds the ledger
// (δ_ij[k], ω_ij[k]) for j in N_i^- plus the sender's own (λ_i[k], γ_i[k]).
template <class S>
struct InformationSet {
  NodeId sender = 0;
  int round = 0;
  NodeSet detected;
  ValuePair<S> self_next;
  ValueMap<S> relayed;
  int declared_out_degree = 0;
  int declared_removed_out = 0;
  bool operator==(const InformationSet&) const = default;
};

template <class S>
using Inbox = std::map<NodeId, InformationSet<S>>;

template <class S>
struct RunningState {
  S y{0};
  S z{1};
  S lam{0};       // λ_i[k]
  S gam{0};       // γ_i[k]
  S lam_next{0};  // λ_i[k+1]
  S gam_next{0};  // γ_i[k+1]
  S ratio{0};
};

enum class Provenance { Direct, Voted, Self };

// C_i[k]: verified running sums of round k. The round-0 set is implicitly
// zero for every id because all running sums start at zero.
template <class S>
struct CheckSet {
  NodeId owner = 0;
  int round = 0;
  ValueMap<S> entries;
  std::map<NodeId, Provenance> provenance;

  std::optional<ValuePair<S>> get(NodeId v) const {
    if (round == 0) return ValuePair<S>{};
    auto it = entries.find(v);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
  bool has(NodeId v) const { return round == 0 || entries.count(v) > 0; }
  void put(NodeId v, const ValuePair<S>& p, Provenance how) {
    entries[v] = p;
    provenance[v] = how;
  }
};

template <class S>
struct NodeState {
  NodeId id = 0;
  int round = 0;
  RunningState<S> run;
  ValueMap<S> ledger;       // δ_ij[k], ω_ij[k] for j in N_i^- ∪ {i}
  ValueMap<S> ledger_prev;  // same at k-1
  NodeSet detected;          // A_i[k]
  NodeSet detected_two_hop;  // A_i^2[k], never broadcast
  NodeSet active_in;         // M_i^-[k]
  NodeSet active_out;        // M_i^+[k]
  int out_degree = 0;        // d_i^+[k]
  int removed_out = 0;       // |ΔM_i^+[k]|
  CheckSet<S> check;         // C_i[k] (extended by voting during round k+1)
  CheckSet<S> check_prev;    // C_i[k-1]
  std::map<NodeId, std::deque<InformationSet<S>>> msg_history;  // newest last, at most 2
  std::map<NodeId, int> first_known;  // id -> round its misbehaviour was first observable
  NodeSet vindicated;                 // in-neighbors whose last full check came back clean
};

struct ProtocolParams {
  double z_floor = 1e-12;
  double eq_tol = 1e-9;
};

// Points where a scripted adversary can bend its own update while keeping the
// broadcast internally consistent.
template <class S>
struct UpdateHooks {
  std::function<void(ValueMap<S>& ledger, int k)> on_ledger;
  std::function<void(S& y, S& z, int k)> on_mass;
};

struct RoundOutcome {
  NodeSet crashed;  // in-neighbors that sent nothing this round
  bool low_mass = false;
};

template <class S>
NodeState<S> bootstrap(NodeId id, double x0, const DirectedGraph& g) {
  g.require_node(id);
  if (!std::isfinite(x0)) throw ArgumentError("initial value of node " + std::to_string(id) + " is not finite");
  NodeState<S> s;
  s.id = id;
  s.round = 0;
  const S one(1);
  s.run.y = from_double<S>(x0);
  s.run.z = one;
  s.run.ratio = s.run.y;
  for (NodeId j : g.in_neighbors(id)) {
    s.ledger[j] = {};
    s.active_in.insert(j);
  }
  s.ledger[id] = {};
  s.ledger_prev = s.ledger;
  s.active_out.insert(g.out_neighbors(id).begin(), g.out_neighbors(id).end());
  s.out_degree = static_cast<int>(s.active_out.size());
  const S w = one + S(s.out_degree);
  s.run.lam_next = s.run.y / w;
  s.run.gam_next = s.run.z / w;
  s.check.owner = s.check_prev.owner = id;
  return s;
}

// Φ_i[k] for the state's current round k.
template <class S>
InformationSet<S> build_information_set(const NodeState<S>& s) {
  InformationSet<S> m;
  m.sender = s.id;
  m.round = s.round;
  m.detected = s.detected;
  m.self_next = {s.run.lam_next, s.run.gam_next};
  m.relayed = s.ledger;
  m.relayed[s.id] = {s.run.lam, s.run.gam};
  m.declared_out_degree = s.out_degree;
  m.declared_removed_out = s.removed_out;
  return m;
}

template <class S>
S ratio(const RunningState<S>& r, const S& fallback, double z_floor, bool* low = nullptr) {
  const bool small = r.z <= from_double<S>(z_floor);
  if (low) *low = small;
  return small ? fallback : S(r.y / r.z);
}

template <class S>
S ratio(const NodeState<S>& s, double z_floor = ProtocolParams{}.z_floor) {
  return ratio(s.run, s.run.ratio, z_floor);
}

// One averaging round: advances `s` from round k-1 to k using Φ_j[k-1] from
// the inbox and this round's new detections.
template <class S>
RoundOutcome honest_round(NodeState<S>& s, const Inbox<S>& inbox, const NodeSet& new_detected,
                          const DirectedGraph& g, const ProtocolParams& params = {},
                          const UpdateHooks<S>* hooks = nullptr) {
  RoundOutcome out;
  const int k = s.round + 1;
  const NodeId i = s.id;

  NodeSet fresh = new_detected;
  for (NodeId j : g.in_neighbors(i))
    if (!s.detected.count(j) && !inbox.count(j)) {
      fresh.insert(j);
      out.crashed.insert(j);
    }

  const NodeSet prev_out = s.active_out;
  s.detected.insert(fresh.begin(), fresh.end());
  s.detected.erase(i);
  s.active_in.clear();
  for (NodeId j : g.in_neighbors(i))
    if (!s.detected.count(j)) s.active_in.insert(j);
  s.active_out.clear();
  for (NodeId q : g.out_neighbors(i))
    if (!s.detected.count(q)) s.active_out.insert(q);
  s.out_degree = static_cast<int>(s.active_out.size());
  s.removed_out = 0;
  for (NodeId q : prev_out) s.removed_out += s.active_out.count(q) ? 0 : 1;

  s.run.lam = s.run.lam_next;
  s.run.gam = s.run.gam_next;

  s.ledger_prev = s.ledger;
  for (NodeId j : g.in_neighbors(i)) {
    if (s.detected.count(j)) {
      s.ledger[j] = {};
    } else {
      s.ledger[j] = inbox.at(j).self_next;
    }
  }
  s.ledger[i] = {s.run.lam, s.run.gam};
  if (hooks && hooks->on_ledger) {
    hooks->on_ledger(s.ledger, k);
    // A removed neighbor's entry stays zero; there is nothing left to bend.
    for (NodeId j : g.in_neighbors(i))
      if (s.detected.count(j)) s.ledger[j] = {};
  }

  S y(0), z(0);
  for (const auto& [j, now] : s.ledger) {
    const auto& before = s.ledger_prev[j];
    y += now.lam - before.lam;
    z += now.gam - before.gam;
  }
  y += S(s.removed_out) * s.run.lam;
  z += S(s.removed_out) * s.run.gam;
  if (hooks && hooks->on_mass) hooks->on_mass(y, z, k);

  s.run.y = y;
  s.run.z = z;
  const S w = S(1) + S(s.out_degree);
  s.run.lam_next = s.run.lam + y / w;
  s.run.gam_next = s.run.gam + z / w;
  s.run.ratio = ratio(s.run, s.run.ratio, params.z_floor, &out.low_mass);
  s.round = k;
  return out;
}

}  // namespace rac
