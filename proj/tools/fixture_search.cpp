// Reruns the fixture searches and writes the frozen fixture graphs as edge lists.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rac/fixture_search.hpp"
#include "rac/graph_io.hpp"

namespace fs = std::filesystem;
using namespace rac;

namespace {

void print_edges(const std::vector<Edge>& e) {
  for (auto [a, b] : e) std::cout << ' ' << a << "->" << b;
  std::cout << '\n';
}

int six() {
  auto hit = fixtures::search_six_node();
  if (!hit) {
    std::cout << "no 6-node instance found\n";
    return 1;
  }
  std::cout << "6-node: " << hit->edges.size() << " edges after " << hit->candidates << " structural candidates\n ";
  print_edges(hit->edges);
  auto frozen = fixtures::six_node_edges();
  std::sort(frozen.begin(), frozen.end());
  std::cout << (frozen == hit->edges ? "matches" : "differs from") << " the frozen fixture\n";
  return 0;
}

int fourteen() {
  auto hit = fixtures::search_fourteen_node();
  if (!hit) {
    std::cout << "no 14-node instance found\n";
    return 1;
  }
  std::cout << "14-node: " << to_string(hit->variant) << " sizes";
  for (int s : hit->sizes) std::cout << ' ' << s;
  std::cout << '\n';
  return 0;
}

int write_graphs(const fs::path& dir) {
  fs::create_directories(dir);
  const std::pair<const char*, DirectedGraph> graphs[] = {
      {"wheel5.txt", fixtures::wheel5()},
      {"six_node.txt", fixtures::six_node()},
      {"six_node_reduced.txt", fixtures::six_node_reduced()},
      {"eight_node.txt", fixtures::eight_node()},
      {"fourteen_node.txt", fixtures::fourteen_node()},
      {"thirty_node.txt", fixtures::thirty_node()},
  };
  for (const auto& [name, g] : graphs) {
    std::ofstream out(dir / name);
    write_edge_list(out, g);
    std::cout << "wrote " << (dir / name).string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixture searches"};
  app.require_subcommand(1);
  auto* s6 = app.add_subcommand("six", "Search the 6-node fixture");
  auto* s14 = app.add_subcommand("fourteen", "Search the 14-node fixture");
  std::string dir = "data/graphs";
  auto* w = app.add_subcommand("write-graphs", "Write every fixture as an edge list");
  w->add_option("--dir", dir, "Output directory");
  CLI11_PARSE(app, argc, argv);
  if (*s6) return six();
  if (*s14) return fourteen();
  if (*w) return write_graphs(dir);
  return 2;
}
