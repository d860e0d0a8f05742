#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rac/errors.hpp"
#include "rac/graph.hpp"

namespace rac {

// Edge-list format:
//   n <count> [undirected]
//   j i        (one per line; j -> i, or {j,i} once for undirected files)
// Blank lines and lines starting with '#' are ignored.
inline DirectedGraph read_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  bool undirected = false;
  std::vector<Edge> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (n < 0) {
      std::string tag, flag;
      ls >> tag >> n;
      if (tag != "n" || !ls || n < 0)
        throw ArgumentError("line " + std::to_string(lineno) + ": expected 'n <count> [undirected]'");
      if (ls >> flag) {
        if (flag != "undirected")
          throw ArgumentError("line " + std::to_string(lineno) + ": unknown header flag '" + flag + "'");
        undirected = true;
      }
      continue;
    }
    int j = 0, i = 0;
    std::string extra;
    if (!(ls >> j >> i) || (ls >> extra))
      throw ArgumentError("line " + std::to_string(lineno) + ": expected 'j i'");
    edges.emplace_back(j, i);
  }
  if (n < 0) throw ArgumentError("missing header line 'n <count>'");
  return undirected ? DirectedGraph::undirected_from(n, edges) : DirectedGraph(n, edges, false);
}

inline DirectedGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const DirectedGraph& g) {
  out << "n " << g.node_count();
  if (g.is_undirected()) out << " undirected";
  out << '\n';
  for (auto [j, i] : g.edges()) {
    if (g.is_undirected() && j > i) continue;
    out << j << ' ' << i << '\n';
  }
}

inline std::string to_edge_list(const DirectedGraph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  return os.str();
}

}  // namespace rac
