#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rac/graph.hpp"
#include "rac/numeric.hpp"
#include "rac/protocol.hpp"

namespace rac {

enum class Cause { Step1, Step1a, Step1b, Step2, Step3, Step4, Crash, InitRange, OracleShared, VoteMajority };

inline const char* to_string(Cause c) {
  switch (c) {
    case Cause::Step1: return "Step1";
    case Cause::Step1a: return "Step1a";
    case Cause::Step1b: return "Step1b";
    case Cause::Step2: return "Step2";
    case Cause::Step3: return "Step3";
    case Cause::Step4: return "Step4";
    case Cause::Crash: return "Crash";
    case Cause::InitRange: return "InitRange";
    case Cause::OracleShared: return "OracleShared";
    case Cause::VoteMajority: return "VoteMajority";
  }
  return "?";
}

struct DetectionVerdict {
  NodeId suspect = 0;
  NodeId detector = 0;
  int round = 0;
  Cause cause = Cause::Step1;
  std::string evidence;
};

struct DetectionParams {
  int f = 1;
  double tol = 1e-9;
  std::optional<std::pair<double, double>> safety_interval;
};

struct DetectionOutput {
  std::vector<DetectionVerdict> verdicts;
  NodeSet new_detected;  // additions to A_i this round
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class S>
std::string fmt(const ValuePair<S>& p) {
  return "(" + fmt(to_double(p.lam)) + ", " + fmt(to_double(p.gam)) + ")";
}

inline std::string fmt(const NodeSet& ids) {
  std::string out = "{";
  for (NodeId v : ids) out += (out.size() > 1 ? "," : "") + std::to_string(v);
  return out + "}";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Voting
// ---------------------------------------------------------------------------

template <class S>
using ValueReports = std::vector<std::pair<NodeId, ValuePair<S>>>;

// Value carried by strictly more than half of the reporters, if any.
template <class S>
std::optional<ValuePair<S>> vote_value(const ValueReports<S>& reports, double tol, int* support = nullptr) {
  const int total = static_cast<int>(reports.size());
  for (std::size_t a = 0; a < reports.size(); ++a) {
    int agree = 0;
    for (const auto& r : reports)
      if (same_pair(reports[a].second, r.second, tol)) ++agree;
    if (2 * agree > total) {
      if (support) *support = agree;
      return reports[a].second;
    }
  }
  if (support) *support = 0;
  return std::nullopt;
}

struct IdVote {
  NodeSet accepted;
  NodeSet dissenters;
};

// accepted: ids named by at least f+1 distinct reporters.
// dissenters: reporters that omit an accepted id they must know about
// (`positioned`) or that name an id the caller can vouch for (`innocent`).
inline IdVote vote_detection_ids(const std::map<NodeId, NodeSet>& sets, int f,
                                 const std::function<bool(NodeId reporter, NodeId id)>& positioned = {},
                                 const std::function<bool(NodeId id)>& innocent = {}) {
  IdVote out;
  std::map<NodeId, int> count;
  for (const auto& [reporter, ids] : sets)
    for (NodeId m : ids) ++count[m];
  for (auto [m, c] : count)
    if (c >= f + 1) out.accepted.insert(m);
  for (const auto& [reporter, ids] : sets) {
    if (positioned)
      for (NodeId m : out.accepted)
        if (!ids.count(m) && positioned(reporter, m)) out.dissenters.insert(reporter);
    if (innocent)
      for (NodeId m : ids)
        if (!out.accepted.count(m) && innocent(m)) out.dissenters.insert(reporter);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction of an in-neighbor's update
// ---------------------------------------------------------------------------

enum class CheckStatus { Clean, Dirty, Inconclusive };

template <class S>
struct ReconstructionResult {
  CheckStatus status = CheckStatus::Inconclusive;
  S lam_pred{0}, gam_pred{0};
  S y_prev{0}, z_prev{0};          // from the reported running sums
  S y_expected{0}, z_expected{0};  // from the verified inputs
  S eps_lam{0}, eps_gam{0};
  int expected_out_degree = 0;
  int expected_removed_out = 0;
  bool declarations_ok = true;
  std::vector<NodeId> missing;
};

// Replays j's update that produced Φ_j[k-1] from Φ_j[k-2]. `in_now` / `in_prev`
// hold verified running sums of N_j^- ∪ {j} at rounds k-1 / k-2; entries the
// replay needs but cannot find make the result Inconclusive.
template <class S>
ReconstructionResult<S> reconstruct_running_sums(const InformationSet<S>& now, const InformationSet<S>& prev,
                                                 const ValueMap<S>& in_now, const ValueMap<S>& in_prev,
                                                 const DirectedGraph& g, double tol) {
  ReconstructionResult<S> r;
  const NodeId j = now.sender;
  int d = 0, removed = 0;
  for (NodeId q : g.out_neighbors(j)) {
    if (!now.detected.count(q)) ++d;
    if (now.detected.count(q) && !prev.detected.count(q)) ++removed;
  }
  r.expected_out_degree = d;
  r.expected_removed_out = removed;
  r.declarations_ok = now.declared_out_degree == d && now.declared_removed_out == removed;

  auto self_now = in_now.find(j);
  if (self_now == in_now.end()) r.missing.push_back(j);

  S y(0), z(0);
  auto add_term = [&](NodeId h, bool zero_now, bool zero_prev) {
    if (!zero_now) {
      auto it = in_now.find(h);
      if (it == in_now.end()) {
        r.missing.push_back(h);
      } else {
        y += it->second.lam;
        z += it->second.gam;
      }
    }
    if (!zero_prev) {
      auto it = in_prev.find(h);
      if (it == in_prev.end()) {
        r.missing.push_back(h);
      } else {
        y -= it->second.lam;
        z -= it->second.gam;
      }
    }
  };
  for (NodeId h : g.in_neighbors(j)) add_term(h, now.detected.count(h) > 0, prev.detected.count(h) > 0);
  add_term(j, false, false);
  if (!r.missing.empty()) {
    std::sort(r.missing.begin(), r.missing.end());
    r.missing.erase(std::unique(r.missing.begin(), r.missing.end()), r.missing.end());
    r.status = r.declarations_ok ? CheckStatus::Inconclusive : CheckStatus::Dirty;
    return r;
  }
  const ValuePair<S> base = self_now->second;
  y += S(removed) * base.lam;
  z += S(removed) * base.gam;
  r.y_expected = y;
  r.z_expected = z;
  const S w = S(1) + S(d);
  r.lam_pred = base.lam + y / w;
  r.gam_pred = base.gam + z / w;
  const S wd = S(1) + S(now.declared_out_degree);
  r.y_prev = (now.self_next.lam - base.lam) * wd;
  r.z_prev = (now.self_next.gam - base.gam) * wd;
  r.eps_lam = now.self_next.lam - r.lam_pred;
  r.eps_gam = now.self_next.gam - r.gam_pred;
  const bool clean = r.declarations_ok && same_value(r.eps_lam, S(0), tol) &&
                     same_value(r.eps_gam, S(0), tol);
  r.status = clean ? CheckStatus::Clean : CheckStatus::Dirty;
  return r;
}

inline std::optional<DetectionVerdict> init_range_check(double x_reported,
                                                        const std::optional<std::pair<double, double>>& interval) {
  if (!interval) return std::nullopt;
  if (x_reported >= interval->first && x_reported <= interval->second) return std::nullopt;
  DetectionVerdict v;
  v.cause = Cause::InitRange;
  v.evidence = "initial value " + detail::fmt(x_reported) + " outside [" + detail::fmt(interval->first) +
               ", " + detail::fmt(interval->second) + "]";
  return v;
}

// ---------------------------------------------------------------------------
// Shared per-neighbor checks
// ---------------------------------------------------------------------------

namespace detail {

struct StepResult {
  bool dirty = false;
  bool conclusive = true;
  Cause cause = Cause::Step2;
  std::string evidence;
};

inline NodeSet expected_relay_keys(const DirectedGraph& g, NodeId j) {
  NodeSet keys(g.in_neighbors(j).begin(), g.in_neighbors(j).end());
  keys.insert(j);
  return keys;
}

// Step 2: the relayed ids are exactly N_j^- ∪ {j}.
template <class S>
StepResult step2(const InformationSet<S>& phi, const DirectedGraph& g) {
  StepResult r;
  const NodeSet keys = expected_relay_keys(g, phi.sender);
  for (const auto& [h, v] : phi.relayed)
    if (!keys.count(h)) {
      r.dirty = true;
      r.evidence += "unexpected relayed id " + std::to_string(h) + "; ";
    }
  for (NodeId h : keys)
    if (!phi.relayed.count(h)) {
      r.dirty = true;
      r.evidence += "missing relayed id " + std::to_string(h) + "; ";
    }
  r.cause = Cause::Step2;
  return r;
}

// Step 3: relayed entries agree with C_i[k-1] (zero for ids j declares detected).
template <class S>
StepResult step3(const InformationSet<S>& phi, const CheckSet<S>& check, double tol) {
  StepResult r;
  r.cause = Cause::Step3;
  for (const auto& [h, got] : phi.relayed) {
    std::optional<ValuePair<S>> want;
    if (h != phi.sender && phi.detected.count(h)) {
      want = ValuePair<S>{};
    } else {
      want = check.get(h);
    }
    if (!want) {
      r.conclusive = false;
      continue;
    }
    if (!same_pair(got, *want, tol)) {
      r.dirty = true;
      r.evidence += "entry " + std::to_string(h) + " relayed " + fmt(got) + " expected " + fmt(*want) + "; ";
    }
  }
  return r;
}

// Step 4: replay of the update behind self_next.
template <class S>
StepResult step4(const InformationSet<S>& now, const InformationSet<S>& prev, const CheckSet<S>& check,
                 const CheckSet<S>& check_prev, const DirectedGraph& g, double tol, bool relayed_fallback) {
  StepResult r;
  r.cause = Cause::Step4;
  ValueMap<S> in_now, in_prev;
  const NodeSet keys = expected_relay_keys(g, now.sender);
  for (NodeId h : keys) {
    if (auto v = check.get(h)) {
      in_now[h] = *v;
    } else if (relayed_fallback && now.relayed.count(h)) {
      in_now[h] = now.relayed.at(h);
    }
    if (auto v = check_prev.get(h)) {
      in_prev[h] = *v;
    } else if (relayed_fallback && prev.relayed.count(h)) {
      in_prev[h] = prev.relayed.at(h);
    }
  }
  auto rec = reconstruct_running_sums(now, prev, in_now, in_prev, g, tol);
  if (rec.status == CheckStatus::Inconclusive) {
    r.conclusive = false;
    return r;
  }
  if (rec.status == CheckStatus::Dirty) {
    r.dirty = true;
    if (!rec.declarations_ok) {
      r.evidence = "declared out-degree " + std::to_string(now.declared_out_degree) + "/removed " +
                   std::to_string(now.declared_removed_out) + " expected " +
                   std::to_string(rec.expected_out_degree) + "/" + std::to_string(rec.expected_removed_out);
    } else {
      r.evidence = "self_next " + fmt(now.self_next) + " reconstructed " +
                   fmt(ValuePair<S>{rec.lam_pred, rec.gam_pred}) + " eps_lam " + fmt(to_double(rec.eps_lam));
    }
  }
  return r;
}

template <class S>
const InformationSet<S>* previous_message(const NodeState<S>& s, NodeId j) {
  auto it = s.msg_history.find(j);
  if (it == s.msg_history.end() || it->second.empty()) return nullptr;
  return &it->second.back();
}

template <class S>
std::vector<DetectionVerdict> round_one_checks(const NodeState<S>& s, const Inbox<S>& inbox, const DirectedGraph& g,
                                               const DetectionParams& p, int k) {
  std::vector<DetectionVerdict> out;
  for (NodeId j : g.in_neighbors(s.id)) {
    auto it = inbox.find(j);
    if (it == inbox.end()) {
      out.push_back({j, s.id, k, Cause::Crash, "no initial values received"});
      continue;
    }
    const double x = to_double(it->second.self_next.lam) * (1.0 + g.out_degree(j));
    if (auto v = init_range_check(x, p.safety_interval)) {
      v->suspect = j;
      v->detector = s.id;
      v->round = k;
      out.push_back(*v);
    }
  }
  return out;
}

template <class S>
void crash_checks(const NodeState<S>& s, const Inbox<S>& inbox, const DirectedGraph& g, int k,
                  std::vector<DetectionVerdict>& out) {
  for (NodeId j : g.in_neighbors(s.id))
    if (!s.detected.count(j) && !inbox.count(j))
      out.push_back({j, s.id, k, Cause::Crash, "no information set received"});
}

}  // namespace detail

// Records this round's inbox: message history and C_i[k]. Called after the
// averaging update so the node's own λ_i[k] is current.
template <class S>
void store_round(NodeState<S>& s, const Inbox<S>& inbox) {
  for (const auto& [j, phi] : inbox) {
    auto& hist = s.msg_history[j];
    hist.push_back(phi);
    while (hist.size() > 2) hist.pop_front();
  }
  s.check_prev = std::move(s.check);
  s.check = CheckSet<S>{};
  s.check.owner = s.id;
  s.check.round = s.round;
  for (const auto& [j, phi] : inbox) s.check.put(j, phi.self_next, Provenance::Direct);
  s.check.put(s.id, {s.run.lam, s.run.gam}, Provenance::Self);
}

// Sharing detection (undirected networks, trusted notification oracle). Runs
// before the averaging update of round k = s.round + 1; `s.detected` is the
// network-wide set shared up to round k-1.
template <class S>
DetectionOutput detect_alg2(NodeState<S>& s, const Inbox<S>& inbox, const DirectedGraph& g,
                            const DetectionParams& p) {
  DetectionOutput out;
  const int k = s.round + 1;
  if (k == 1) {
    out.verdicts = detail::round_one_checks(s, inbox, g, p, k);
  } else {
    detail::crash_checks(s, inbox, g, k, out.verdicts);
    for (NodeId j : g.in_neighbors(s.id)) {
      if (s.detected.count(j) || !inbox.count(j)) continue;
      const auto& phi = inbox.at(j);
      auto flag = [&](Cause c, std::string ev) { out.verdicts.push_back({j, s.id, k, c, std::move(ev)}); };
      if (phi.detected != s.detected) {
        flag(Cause::Step1, "declared " + detail::fmt(phi.detected) + " shared " + detail::fmt(s.detected));
        continue;
      }
      if (auto r = detail::step2(phi, g); r.dirty) {
        flag(r.cause, r.evidence);
        continue;
      }
      if (auto r = detail::step3(phi, s.check, p.tol); r.dirty) {
        flag(r.cause, r.evidence);
        continue;
      }
      if (const auto* prev = detail::previous_message(s, j)) {
        if (auto r = detail::step4(phi, *prev, s.check, s.check_prev, g, p.tol, true); r.dirty) flag(r.cause, r.evidence);
      }
    }
  }
  for (const auto& v : out.verdicts) out.new_detected.insert(v.suspect);
  return out;
}

namespace detail {

// Whether i knows as much about j's neighborhood as anyone: every in- and
// out-neighbor of j other than i is detectable by i.
inline bool neighborhood_visible(const DirectedGraph& g, int f, NodeId i, NodeId j) {
  for (NodeId x : g.in_neighbors(j))
    if (x != i && !is_detectable(g, f, x, i)) return false;
  for (NodeId x : g.out_neighbors(j))
    if (x != i && !is_detectable(g, f, x, i)) return false;
  return true;
}

}  // namespace detail

// Fully distributed detection with two-hop voting. Runs before the averaging
// update of round k = s.round + 1. Updates A_i^2, the voted part of C_i[k-1],
// first-known rounds and vindication in place; A_i additions are returned.
template <class S>
DetectionOutput detect_alg3(NodeState<S>& s, const Inbox<S>& inbox, const DirectedGraph& g,
                            const DetectionParams& p) {
  DetectionOutput out;
  const int k = s.round + 1;
  const NodeId i = s.id;
  // `universal`: every out-neighbor of j with full information reaches the
  // same verdict this round, so later omissions by them are faults.
  auto add_verdict = [&](NodeId j, Cause c, std::string ev, bool universal) {
    if (j == i || s.detected.count(j) || out.new_detected.count(j)) return;
    out.verdicts.push_back({j, i, k, c, std::move(ev)});
    out.new_detected.insert(j);
    s.vindicated.erase(j);
    if (universal) s.first_known.emplace(j, k);
  };

  if (k == 1) {
    for (auto& v : detail::round_one_checks(s, inbox, g, p, k)) add_verdict(v.suspect, v.cause, v.evidence, true);
    return out;
  }

  for (NodeId j : g.in_neighbors(i))
    if (!s.detected.count(j) && !inbox.count(j)) add_verdict(j, Cause::Crash, "no information set received", true);

  std::vector<NodeId> reporters;
  for (NodeId j : g.in_neighbors(i))
    if (!s.detected.count(j) && inbox.count(j)) reporters.push_back(j);

  // Two-hop values into C_i[k-1].
  for (NodeId h : g.two_hop_in_neighbors(i)) {
    ValueReports<S> reports;
    for (NodeId j : reporters) {
      const auto& phi = inbox.at(j);
      if (!g.has_edge(h, j) || phi.detected.count(h)) continue;
      auto it = phi.relayed.find(h);
      if (it != phi.relayed.end()) reports.emplace_back(j, it->second);
    }
    if (reports.empty()) continue;
    int support = 0;
    auto v = vote_value(reports, p.tol, &support);
    if (v && support >= p.f + 1 && !s.check.entries.count(h)) s.check.put(h, *v, Provenance::Voted);
  }

  // Detection ids.
  std::map<NodeId, NodeSet> claims;
  for (NodeId j : reporters) claims[j] = inbox.at(j).detected;
  auto known = [&](NodeId m) {
    return s.detected.count(m) || s.detected_two_hop.count(m) || out.new_detected.count(m);
  };
  auto innocent = [&](NodeId m) { return m == i || s.vindicated.count(m) > 0; };
  auto vote = vote_detection_ids(claims, p.f, {}, innocent);
  for (NodeId m : vote.accepted) {
    if (m == i || known(m)) continue;
    s.first_known.emplace(m, k - 1);
    if (g.has_edge(m, i) || g.has_edge(i, m)) {
      out.new_detected.insert(m);
      s.vindicated.erase(m);
      out.verdicts.push_back({m, i, k, Cause::VoteMajority,
                              "reported by " + std::to_string(p.f + 1) + "+ in-neighbors"});
    } else {
      s.detected_two_hop.insert(m);
    }
  }
  // A reporter naming a node i can vouch for is faulty.
  for (NodeId j : vote.dissenters) add_verdict(j, Cause::VoteMajority, "accuses a node known to be clean", false);

  auto deadline_passed = [&](NodeId m, int lag) {
    auto it = s.first_known.find(m);
    return it != s.first_known.end() && k >= it->second + lag;
  };

  // Per-neighbor checks against the post-vote snapshot.
  for (NodeId j : reporters) {
    if (out.new_detected.count(j)) {
      s.vindicated.erase(j);
      continue;
    }
    const auto& phi = inbox.at(j);
    const auto* prev = detail::previous_message(s, j);
    bool conclusive = detail::neighborhood_visible(g, p.f, i, j) && prev != nullptr;
    struct Fault {
      Cause cause;
      std::string evidence;
      bool universal;
    };
    std::optional<Fault> fault;
    auto fail = [&](Cause c, std::string ev, bool universal = false) {
      if (!fault) fault = Fault{c, std::move(ev), universal};
    };

    // Step 1a: detections of j's in-neighbors.
    for (NodeId m : g.in_neighbors(j)) {
      const bool claimed = phi.detected.count(m) > 0;
      if (claimed && !known(m)) {
        if (innocent(m)) {
          fail(Cause::Step1a, "claims detection of clean node " + std::to_string(m));
        } else {
          conclusive = false;
        }
      } else if (!claimed && known(m) && deadline_passed(m, 1)) {
        fail(Cause::Step1a, "omits detection of in-neighbor " + std::to_string(m));
      }
    }
    // Step 1b: detections of out-only neighbors, plus persistence.
    for (NodeId l : g.out_neighbors(j)) {
      if (g.has_edge(l, j)) continue;
      const bool claimed = phi.detected.count(l) > 0;
      if (claimed && !known(l)) {
        if (innocent(l)) {
          fail(Cause::Step1b, "claims detection of clean node " + std::to_string(l));
        } else if (prev && prev->detected.count(l)) {
          fail(Cause::Step1b, "unbacked detection of " + std::to_string(l) + " repeated");
        } else {
          conclusive = false;
        }
      } else if (!claimed && known(l) && deadline_passed(l, 2)) {
        fail(Cause::Step1b, "omits detection of out-neighbor " + std::to_string(l));
      }
    }
    for (NodeId m : phi.detected)
      if (m == j || (!g.has_edge(m, j) && !g.has_edge(j, m)))
        fail(Cause::Step1b, "claims detection of non-neighbor " + std::to_string(m), true);
    if (prev)
      for (NodeId m : prev->detected)
        if (!phi.detected.count(m)) fail(Cause::Step1b, "drops earlier detection of " + std::to_string(m), true);

    if (!fault)
      if (auto r = detail::step2(phi, g); r.dirty) fail(r.cause, r.evidence, true);
    if (!fault) {
      auto r = detail::step3(phi, s.check, p.tol);
      if (r.dirty) fail(r.cause, r.evidence, true);
      conclusive = conclusive && r.conclusive;
    }
    if (!fault && prev) {
      auto r = detail::step4(phi, *prev, s.check, s.check_prev, g, p.tol, false);
      if (r.dirty) fail(r.cause, r.evidence, true);
      conclusive = conclusive && r.conclusive;
    }
    if (fault) {
      add_verdict(j, fault->cause, fault->evidence, fault->universal);
    } else if (!conclusive) {
      s.vindicated.erase(j);
    }
  }
  return out;
}

// Vindication starts optimistic for in-neighbors whose whole neighborhood
// i can observe, and is withdrawn on the first dirty or incomplete check.
template <class S>
void init_detection_state(NodeState<S>& s, const DirectedGraph& g, int f) {
  s.vindicated.clear();
  for (NodeId j : g.in_neighbors(s.id))
    if (detail::neighborhood_visible(g, f, s.id, j)) s.vindicated.insert(j);
}

}  // namespace rac
