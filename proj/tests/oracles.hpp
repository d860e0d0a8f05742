#pragma once

// Independent reference implementations used only by tests. They work on a
// plain adjacency matrix and share no code with the library checkers.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "rac/graph.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<int>>;  // m[j][i] = 1 if j -> i, 1-based

inline Matrix matrix_of(const rac::DirectedGraph& g) {
  const int n = g.node_count();
  Matrix m(n + 1, std::vector<int>(n + 1, 0));
  for (auto [j, i] : g.edges()) m[j][i] = 1;
  return m;
}

inline bool strongly_connected(const Matrix& m, std::uint32_t removed) {
  const int n = static_cast<int>(m.size()) - 1;
  std::vector<int> alive;
  for (int v = 1; v <= n; ++v)
    if (!(removed >> (v - 1) & 1u)) alive.push_back(v);
  if (alive.size() <= 1) return true;
  // Floyd-Warshall style transitive closure on the survivors.
  Matrix r = m;
  for (int v = 1; v <= n; ++v) r[v][v] = 1;
  for (int k : alive)
    for (int a : alive)
      for (int b : alive)
        if (r[a][k] && r[k][b]) r[a][b] = 1;
  for (int a : alive)
    for (int b : alive)
      if (!r[a][b]) return false;
  return true;
}

// Local-model predicate: no surviving node has more than `f` removed in-neighbors.
inline bool is_local(const Matrix& m, std::uint32_t removed, int f) {
  const int n = static_cast<int>(m.size()) - 1;
  for (int i = 1; i <= n; ++i) {
    if (removed >> (i - 1) & 1u) continue;
    int bad = 0;
    for (int j = 1; j <= n; ++j)
      if (m[j][i] && (removed >> (j - 1) & 1u)) ++bad;
    if (bad > f) return false;
  }
  return true;
}

// Every subset of size up to the largest (k-1)-local set, filtered by the
// local predicate afterwards.
inline bool k_strongly_connected(const Matrix& m, int k) {
  const int n = static_cast<int>(m.size()) - 1;
  int max_size = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s)
    if (is_local(m, s, k - 1)) max_size = std::max(max_size, __builtin_popcount(s));
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    if (__builtin_popcount(s) > max_size) continue;
    if (!is_local(m, s, k - 1)) continue;
    if (!strongly_connected(m, s)) return false;
  }
  return true;
}

inline int middles(const Matrix& m, int h, int i) {
  const int n = static_cast<int>(m.size()) - 1;
  int c = 0;
  for (int x = 1; x <= n; ++x)
    if (x != h && x != i && m[h][x] && m[x][i]) ++c;
  return c;
}

inline bool detectable(const Matrix& m, int f, int h, int i) { return m[h][i] || middles(m, h, i) >= 2 * f + 1; }

// All three sub-conditions, evaluated literally.
inline bool alg3_condition(const Matrix& m, int f) {
  const int n = static_cast<int>(m.size()) - 1;
  for (int i = 1; i <= n; ++i) {
    for (int h = 1; h <= n; ++h) {
      if (h == i) continue;
      bool two_hop = !m[h][i] && middles(m, h, i) > 0;
      bool out = m[i][h];
      bool out_of_in = false;
      for (int j = 1; j <= n; ++j)
        if (j != h && m[j][i] && m[j][h]) out_of_in = true;
      if ((two_hop || out || out_of_in) && !detectable(m, f, h, i)) return false;
    }
  }
  return true;
}

inline rac::DirectedGraph random_digraph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<rac::Edge> e;
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      if (a != b && coin(rng)) e.emplace_back(a, b);
  return rac::DirectedGraph(n, e, false);
}

}  // namespace oracle
