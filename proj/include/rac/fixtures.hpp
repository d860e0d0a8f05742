#pragma once

// Named topologies used by the golden scenarios and tests. Where a topology
// could not be pinned down exactly, the instance here was found by the
// searches in rac/fixture_search.hpp and is frozen so results stay stable.

#include <vector>

#include "rac/graph.hpp"

namespace rac::fixtures {

// Hub 1 joined to every node, rim cycle 2-3-4-5-2. Undirected, 3-connected.
inline DirectedGraph wheel5() {
  return DirectedGraph::undirected_from(5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 3}, {3, 4}, {4, 5}, {5, 2}});
}

// Undirected pairs every 6-node candidate keeps; the reduced variant drops them.
inline const std::vector<Edge>& six_node_matching() {
  static const std::vector<Edge> m{{1, 4}, {2, 5}, {3, 6}};
  return m;
}

inline std::vector<Edge> six_node_edges() {
  return {{1, 2}, {1, 4}, {1, 5}, {1, 6}, {2, 4}, {2, 5}, {2, 6}, {3, 4}, {3, 5}, {3, 6}, {4, 1},
          {4, 2}, {4, 3}, {5, 1}, {5, 2}, {5, 3}, {6, 1}, {6, 2}, {6, 3}, {6, 4}, {6, 5}};
}

inline std::vector<Edge> without_matching(const std::vector<Edge>& edges) {
  std::vector<Edge> out;
  for (auto [a, b] : edges) {
    bool drop = false;
    for (auto [u, v] : six_node_matching())
      if ((a == u && b == v) || (a == v && b == u)) drop = true;
    if (!drop) out.emplace_back(a, b);
  }
  return out;
}

// Directed; meets the Alg3 condition for f=1 and is 2-strongly connected.
inline DirectedGraph six_node() { return DirectedGraph(6, six_node_edges(), false); }

// six_node() minus the undirected pairs (1,4), (2,5), (3,6). Fails the condition.
inline DirectedGraph six_node_reduced() { return DirectedGraph(6, without_matching(six_node_edges()), false); }

// {1,3,...,8} complete; node 2 exchanges with 1, 8 and `partner` and only
// sends to the other four.
inline DirectedGraph eight_node(NodeId partner = 3) {
  std::vector<Edge> e;
  const std::vector<NodeId> core{1, 3, 4, 5, 6, 7, 8};
  for (NodeId a : core)
    for (NodeId b : core)
      if (a != b) e.emplace_back(a, b);
  for (NodeId v : core) {
    e.emplace_back(2, v);
    if (v == 1 || v == 8 || v == partner) e.emplace_back(v, 2);
  }
  return DirectedGraph(8, e, false);
}

inline DirectedGraph fourteen_node() {
  const std::vector<int> sizes{3, 3, 3, 3, 2};
  return generate_layered_sizes(sizes, LayerVariant::DirectedWrap);
}

inline DirectedGraph thirty_node() { return generate_layered(10, 1, LayerVariant::UndirectedPath); }

}  // namespace rac::fixtures
