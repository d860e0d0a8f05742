#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rac/errors.hpp"

namespace rac {

// Nodes are identified 1..n throughout.
using NodeId = int;
using NodeSet = std::set<NodeId>;
using Edge = std::pair<NodeId, NodeId>;  // (j, i): j can send to i

enum class AdversaryKind { Total, Local };

struct AdversaryModel {
  int f = 0;
  AdversaryKind kind = AdversaryKind::Local;
};

// Default cap for the exhaustive connectivity checkers.
inline constexpr int kDefaultEnumerationCap = 20;

#ifdef NDEBUG
inline constexpr bool kCrossCheckUndirected = false;
#else
inline constexpr bool kCrossCheckUndirected = true;
#endif

class DirectedGraph {
 public:
  DirectedGraph() = default;

  // `edges` are ordered pairs. When `undirected` is set the edge set must
  // already be symmetric; use `undirected_from` to symmetrize a list of
  // unordered edges.
  DirectedGraph(int n, const std::vector<Edge>& edges, bool undirected = false)
      : n_(n), undirected_(undirected) {
    if (n < 0) throw ArgumentError("node count must be non-negative");
    adj_.assign(static_cast<std::size_t>(n) * n, 0);
    in_.assign(n + 1, {});
    out_.assign(n + 1, {});
    for (auto [j, i] : edges) {
      if (j < 1 || j > n || i < 1 || i > n) {
        throw ArgumentError("edge (" + std::to_string(j) + "," + std::to_string(i) +
                            ") has an endpoint outside 1.." + std::to_string(n));
      }
      if (j == i) throw ArgumentError("self-loop at node " + std::to_string(j));
      char& cell = adj_[index(j, i)];
      if (cell) continue;
      cell = 1;
      out_[j].push_back(i);
      in_[i].push_back(j);
    }
    for (auto& v : in_) std::sort(v.begin(), v.end());
    for (auto& v : out_) std::sort(v.begin(), v.end());
    if (undirected_) {
      for (auto [j, i] : edges) {
        if (!has_edge(i, j)) {
          throw ArgumentError("graph flagged undirected but edge (" + std::to_string(j) +
                              "," + std::to_string(i) + ") has no reverse");
        }
      }
    }
  }

  static DirectedGraph undirected_from(int n, const std::vector<Edge>& pairs) {
    std::vector<Edge> both;
    both.reserve(pairs.size() * 2);
    for (auto [a, b] : pairs) {
      both.emplace_back(a, b);
      both.emplace_back(b, a);
    }
    return DirectedGraph(n, both, true);
  }

  static DirectedGraph complete(int n) {
    std::vector<Edge> e;
    for (int a = 1; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) e.emplace_back(a, b);
    return undirected_from(n, e);
  }

  static DirectedGraph directed_cycle(int n) {
    std::vector<Edge> e;
    for (int a = 1; a <= n; ++a) e.emplace_back(a, a % n + 1);
    return DirectedGraph(n, e, false);
  }

  int node_count() const { return n_; }
  bool is_undirected() const { return undirected_; }

  bool valid_node(NodeId v) const { return v >= 1 && v <= n_; }
  void require_node(NodeId v) const {
    if (!valid_node(v)) throw ArgumentError("invalid node id " + std::to_string(v));
  }

  bool has_edge(NodeId j, NodeId i) const {
    return valid_node(j) && valid_node(i) && adj_[index(j, i)] != 0;
  }

  const std::vector<NodeId>& in_neighbors(NodeId i) const { return in_.at(i); }
  const std::vector<NodeId>& out_neighbors(NodeId i) const { return out_.at(i); }
  int in_degree(NodeId i) const { return static_cast<int>(in_.at(i).size()); }
  int out_degree(NodeId i) const { return static_cast<int>(out_.at(i).size()); }

  std::vector<Edge> edges() const {
    std::vector<Edge> e;
    for (int j = 1; j <= n_; ++j)
      for (int i : out_[j]) e.emplace_back(j, i);
    return e;
  }

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (int j = 1; j <= n_; ++j) m += out_[j].size();
    return m;
  }

  // 𝒩_i^{2-}: nodes two hops upstream of i that are neither i nor a direct
  // in-neighbor.
  NodeSet two_hop_in_neighbors(NodeId i) const {
    NodeSet out;
    for (NodeId j : in_.at(i))
      for (NodeId h : in_[j])
        if (h != i && !has_edge(h, i)) out.insert(h);
    return out;
  }

  bool operator==(const DirectedGraph& o) const {
    return n_ == o.n_ && undirected_ == o.undirected_ && adj_ == o.adj_;
  }

 private:
  std::size_t index(NodeId j, NodeId i) const {
    return static_cast<std::size_t>(j - 1) * n_ + (i - 1);
  }

  int n_ = 0;
  bool undirected_ = false;
  std::vector<char> adj_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> out_;
};

struct ConditionViolation {
  std::vector<NodeId> nodes;
  std::string condition;
  std::string witness;
};

struct ConditionReport {
  std::vector<ConditionViolation> violations;
  bool satisfied() const { return violations.empty(); }
};

// ---------------------------------------------------------------------------
// Neighborhood structure
// ---------------------------------------------------------------------------

inline NodeSet two_hop_middle_nodes(const DirectedGraph& g, NodeId h, NodeId i) {
  g.require_node(h);
  g.require_node(i);
  if (h == i) throw ArgumentError("two_hop_middle_nodes requires h != i");
  NodeSet mids;
  for (NodeId m : g.out_neighbors(h))
    if (m != i && g.has_edge(m, i)) mids.insert(m);
  return mids;
}

inline bool is_detectable(const DirectedGraph& g, int f, NodeId h, NodeId i) {
  if (f < 0) throw ArgumentError("f must be non-negative");
  g.require_node(h);
  g.require_node(i);
  if (h == i) throw ArgumentError("is_detectable requires h != i");
  if (g.has_edge(h, i)) return true;
  return static_cast<int>(two_hop_middle_nodes(g, h, i).size()) >= 2 * f + 1;
}

namespace detail {

inline void require_detectable(const DirectedGraph& g, int f, NodeId h, NodeId i,
                               const char* condition, ConditionReport& report,
                               std::set<std::pair<NodeId, NodeId>>& seen) {
  if (h == i || !seen.emplace(h, i).second) return;
  if (is_detectable(g, f, h, i)) return;
  auto mids = two_hop_middle_nodes(g, h, i);
  report.violations.push_back(
      {{h, i}, condition,
       "node " + std::to_string(h) + " reaches node " + std::to_string(i) + " via " +
           std::to_string(mids.size()) + " two-hop paths (< " + std::to_string(2 * f + 1) +
           ")"});
}

inline ConditionReport alg3_condition_impl(const DirectedGraph& g, int f, bool all_three) {
  ConditionReport report;
  const int n = g.node_count();
  for (NodeId i = 1; i <= n; ++i) {
    std::set<std::pair<NodeId, NodeId>> seen;
    for (NodeId h : g.two_hop_in_neighbors(i))
      require_detectable(g, f, h, i, "two-hop in-neighbor detectable", report, seen);
    if (!all_three) continue;
    for (NodeId q : g.out_neighbors(i))
      require_detectable(g, f, q, i, "out-neighbor detectable", report, seen);
    for (NodeId j : g.in_neighbors(i))
      for (NodeId l : g.out_neighbors(j))
        require_detectable(g, f, l, i, "out-neighbor of in-neighbor detectable", report, seen);
  }
  return report;
}

// Reachability over the nodes with keep[v] set, forward and backward from
// the first kept node.
inline bool strongly_connected_subset(const DirectedGraph& g, const std::vector<char>& keep) {
  const int n = g.node_count();
  NodeId root = 0;
  int kept = 0;
  for (NodeId v = 1; v <= n; ++v)
    if (keep[v]) {
      if (!root) root = v;
      ++kept;
    }
  if (kept <= 1) return true;
  auto reach = [&](bool forward) {
    std::vector<char> seen(n + 1, 0);
    std::queue<NodeId> q;
    q.push(root);
    seen[root] = 1;
    int count = 1;
    while (!q.empty()) {
      NodeId v = q.front();
      q.pop();
      const auto& next = forward ? g.out_neighbors(v) : g.in_neighbors(v);
      for (NodeId u : next)
        if (keep[u] && !seen[u]) {
          seen[u] = 1;
          ++count;
          q.push(u);
        }
    }
    return count;
  };
  return reach(true) == kept && reach(false) == kept;
}

}  // namespace detail

// Detectability condition: for every node i, (1) two-hop in-neighbors,
// (2) out-neighbors, (3) out-neighbors of in-neighbors are all detectable by i.
// On undirected graphs (1) implies (2) and (3); with `cross_check` the full
// check also runs and the verdicts must agree.
inline ConditionReport check_alg3_condition(const DirectedGraph& g, int f,
                                            bool cross_check = kCrossCheckUndirected) {
  if (f < 0) throw ArgumentError("f must be non-negative");
  if (!g.is_undirected()) return detail::alg3_condition_impl(g, f, true);
  auto shortcut = detail::alg3_condition_impl(g, f, false);
  if (cross_check) {
    auto full = detail::alg3_condition_impl(g, f, true);
    if (full.satisfied() != shortcut.satisfied())
      throw std::logic_error("undirected shortcut disagrees with full condition check");
  }
  return shortcut;
}

// Every adjacent pair shares at least max(f-1, 0) common neighbors.
inline ConditionReport check_alg2_condition(const DirectedGraph& g, int f) {
  if (!g.is_undirected())
    throw UnsupportedError("the sharing-detection condition is defined for undirected graphs");
  if (f < 0) throw ArgumentError("f must be non-negative");
  ConditionReport report;
  const int need = std::max(f - 1, 0);
  for (NodeId a = 1; a <= g.node_count(); ++a)
    for (NodeId b : g.out_neighbors(a)) {
      if (b < a) continue;
      int common = 0;
      for (NodeId c : g.out_neighbors(a))
        if (c != b && g.has_edge(c, b)) ++common;
      if (common < need)
        report.violations.push_back({{a, b}, "common neighbors of adjacent pair",
                                     std::to_string(common) + " common neighbors (< " +
                                         std::to_string(need) + ")"});
    }
  return report;
}

// Per-instance variant: every adjacent pair of adversaries has at least one
// common neighbor outside the adversary set.
inline ConditionReport check_alg2_condition(const DirectedGraph& g, const NodeSet& adversaries) {
  if (!g.is_undirected())
    throw UnsupportedError("the sharing-detection condition is defined for undirected graphs");
  ConditionReport report;
  for (NodeId a : adversaries) {
    g.require_node(a);
    for (NodeId b : g.out_neighbors(a)) {
      if (b < a || !adversaries.count(b)) continue;
      bool ok = false;
      for (NodeId c : g.out_neighbors(a))
        if (c != b && !adversaries.count(c) && g.has_edge(c, b)) ok = true;
      if (!ok)
        report.violations.push_back(
            {{a, b}, "normal common neighbor of adjacent adversaries", "none"});
    }
  }
  return report;
}

inline bool is_f_local(const DirectedGraph& g, const NodeSet& adversaries, int f) {
  for (NodeId a : adversaries) g.require_node(a);
  for (NodeId i = 1; i <= g.node_count(); ++i) {
    if (adversaries.count(i)) continue;
    int bad = 0;
    for (NodeId j : g.in_neighbors(i)) bad += adversaries.count(j) ? 1 : 0;
    if (bad > f) return false;
  }
  return true;
}

inline bool is_f_total(const NodeSet& adversaries, int f) {
  return static_cast<int>(adversaries.size()) <= f;
}

// True iff removing any (k-1)-local node set leaves a strongly connected
// digraph. Exact enumeration with pruning: a node decided "kept" whose count
// of removed in-neighbors exceeds k-1 kills the branch.
inline bool is_k_strongly_connected(const DirectedGraph& g, int k,
                                    int cap = kDefaultEnumerationCap) {
  if (k < 1) throw ArgumentError("k must be at least 1");
  const int n = g.node_count();
  if (n > cap) throw InstanceTooLarge(n, cap);
  const int limit = k - 1;
  std::vector<char> keep(n + 1, 1);
  std::vector<int> bad_in(n + 1, 0);
  keep[0] = 0;

  // Nodes are decided in id order; removing v can only push already-kept
  // lower ids over the limit, which kills the branch early.
  std::function<bool(NodeId)> dfs = [&](NodeId v) -> bool {
    if (v > n) {
      for (NodeId u = 1; u <= n; ++u)
        if (keep[u] && bad_in[u] > limit) return true;  // not a local set
      return detail::strongly_connected_subset(g, keep);
    }
    if (!dfs(v + 1)) return false;
    bool feasible = true;
    keep[v] = 0;
    for (NodeId u : g.out_neighbors(v)) {
      ++bad_in[u];
      if (u < v && keep[u] && bad_in[u] > limit) feasible = false;
    }
    bool result = feasible ? dfs(v + 1) : true;
    for (NodeId u : g.out_neighbors(v)) --bad_in[u];
    keep[v] = 1;
    return result;
  };
  return dfs(1);
}

// Undirected k-connectivity: at least k+1 nodes and no set of fewer than k
// nodes disconnects the graph.
inline bool vertex_connectivity_at_least(const DirectedGraph& g, int k,
                                         int cap = kDefaultEnumerationCap) {
  if (!g.is_undirected()) throw UnsupportedError("vertex connectivity requires an undirected graph");
  if (k < 1) throw ArgumentError("k must be at least 1");
  const int n = g.node_count();
  if (n > cap) throw InstanceTooLarge(n, cap);
  if (n < k + 1) return false;
  std::vector<char> keep(n + 1, 1);
  keep[0] = 0;
  std::function<bool(NodeId, int)> dfs = [&](NodeId v, int budget) -> bool {
    if (v > n) return detail::strongly_connected_subset(g, keep);
    if (!dfs(v + 1, budget)) return false;
    if (budget == 0) return true;
    keep[v] = 0;
    bool r = dfs(v + 1, budget - 1);
    keep[v] = 1;
    return r;
  };
  return dfs(1, k - 1);
}

inline bool min_in_degree_ok(const DirectedGraph& g, int f) {
  for (NodeId i = 1; i <= g.node_count(); ++i)
    if (g.in_degree(i) < 2 * f + 1) return false;
  return true;
}

inline bool is_strongly_connected(const DirectedGraph& g) {
  std::vector<char> keep(g.node_count() + 1, 1);
  keep[0] = 0;
  return detail::strongly_connected_subset(g, keep);
}

struct Subgraph {
  DirectedGraph graph;             // nodes renumbered 1..m
  std::vector<NodeId> original;    // original[new_id] = old id (index 0 unused)
};

// Induced subgraph on V minus `adversaries`; ids are compacted and the map
// back to the original ids is returned alongside.
inline Subgraph normal_subgraph(const DirectedGraph& g, const NodeSet& adversaries) {
  for (NodeId a : adversaries) g.require_node(a);
  const int n = g.node_count();
  std::vector<NodeId> fwd(n + 1, 0);
  Subgraph out;
  out.original.push_back(0);
  for (NodeId v = 1; v <= n; ++v)
    if (!adversaries.count(v)) {
      out.original.push_back(v);
      fwd[v] = static_cast<NodeId>(out.original.size() - 1);
    }
  const int m = static_cast<int>(out.original.size()) - 1;
  if (m == 0) throw ArgumentError("normal subgraph is empty: every node is an adversary");
  std::vector<Edge> e;
  for (auto [j, i] : g.edges())
    if (fwd[j] && fwd[i]) e.emplace_back(fwd[j], fwd[i]);
  out.graph = DirectedGraph(m, e, g.is_undirected());
  return out;
}

enum class LayerVariant { UndirectedPath, DirectedWrap };

// Layered construction with explicit layer sizes (layer-major ids). Every
// node is joined to every node of the adjacent layers. DirectedWrap adds
// one-way edges from each node of the last layer to each node of the layer
// two steps back, which keeps the detectability condition intact.
inline DirectedGraph generate_layered_sizes(std::span<const int> sizes, LayerVariant variant) {
  const int layers = static_cast<int>(sizes.size());
  if (layers < 2) throw ArgumentError("need at least 2 layers");
  if (variant == LayerVariant::DirectedWrap && layers < 3)
    throw ArgumentError("DirectedWrap needs at least 3 layers");
  std::vector<int> first(layers + 1, 1);
  for (int t = 0; t < layers; ++t) {
    if (sizes[t] < 1) throw ArgumentError("layer sizes must be positive");
    first[t + 1] = first[t] + sizes[t];
  }
  const int n = first[layers] - 1;
  std::vector<Edge> e;
  for (int t = 0; t + 1 < layers; ++t)
    for (int a = first[t]; a < first[t + 1]; ++a)
      for (int b = first[t + 1]; b < first[t + 2]; ++b) {
        e.emplace_back(a, b);
        e.emplace_back(b, a);
      }
  if (variant == LayerVariant::DirectedWrap) {
    const int last = layers - 1, back = layers - 3;
    for (int a = first[last]; a < first[last + 1]; ++a)
      for (int b = first[back]; b < first[back + 1]; ++b) e.emplace_back(a, b);
  }
  return DirectedGraph(n, e, variant == LayerVariant::UndirectedPath);
}

inline DirectedGraph generate_layered(int layers, int f, LayerVariant variant) {
  if (layers < 2) throw ArgumentError("layers must be at least 2");
  if (f < 0) throw ArgumentError("f must be non-negative");
  std::vector<int> sizes(layers, 2 * f + 1);
  return generate_layered_sizes(sizes, variant);
}

inline const char* to_string(LayerVariant v) {
  return v == LayerVariant::UndirectedPath ? "UndirectedPath" : "DirectedWrap";
}

inline LayerVariant parse_layer_variant(const std::string& s) {
  if (s == "UndirectedPath") return LayerVariant::UndirectedPath;
  if (s == "DirectedWrap") return LayerVariant::DirectedWrap;
  throw ArgumentError("unknown layer variant '" + s + "'");
}

}  // namespace rac
