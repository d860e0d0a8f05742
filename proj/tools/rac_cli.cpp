#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rac/rac.hpp"

namespace fs = std::filesystem;
using namespace rac;

namespace {

enum Exit { kOk = 0, kUnreadable = 1, kInvalid = 2, kCheckFailed = 3, kGeneratorBug = 4 };

void print_report(const std::string& label, const ConditionReport& r) {
  std::cout << label << ": " << (r.satisfied() ? "pass" : "fail") << '\n';
  for (const auto& v : r.violations) {
    std::cout << "  " << v.condition << " [";
    for (std::size_t a = 0; a < v.nodes.size(); ++a) std::cout << (a ? " " : "") << v.nodes[a];
    std::cout << "] " << v.witness << '\n';
  }
}

struct RunFlags {
  std::string scenario;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool exact = false;
  std::optional<double> tol;
};

void apply_overrides(Scenario& sc, const RunFlags& fl) {
  if (fl.seed) sc.seed = *fl.seed;
  if (fl.exact) sc.arithmetic = Arithmetic::Exact;
  if (fl.tol) sc.tol = *fl.tol;
}

template <class S>
nlohmann::json run_and_write(const Scenario& sc, const fs::path& out) {
  const auto t = run<S>(sc);
  fs::create_directories(out);
  std::ofstream trace(out / "trace.csv");
  write_trace_csv(trace, t);
  std::ofstream events(out / "events.csv");
  write_events_csv(events, t);
  auto summary = summary_json(sc, t);
  std::ofstream(out / "summary.json") << summary.dump(2) << '\n';
  return summary;
}

int cmd_run(const RunFlags& fl) {
  Scenario sc;
  try {
    sc = load_scenario(fl.scenario);
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario '" << fl.scenario << "':\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kUnreadable;
  }
  apply_overrides(sc, fl);
  try {
    auto summary = sc.arithmetic == Arithmetic::Exact ? run_and_write<Rational>(sc, fl.out)
                                                      : run_and_write<double>(sc, fl.out);
    std::cout << summary.dump(2) << '\n';
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return kInvalid;
  }
  return kOk;
}

struct CheckFlags {
  std::string graph;
  int f = 1;
  bool alg2 = false;
  bool alg3 = false;
  std::optional<int> k_strong;
};

int cmd_check_graph(const CheckFlags& fl) {
  DirectedGraph g;
  try {
    g = read_edge_list_file(fl.graph);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kUnreadable;
  }
  if (fl.alg2 && !g.is_undirected()) {
    std::cerr << "--alg2 needs an undirected graph\n";
    return kInvalid;
  }
  bool ok = true;
  std::cout << "nodes " << g.node_count() << ", edges " << g.edges().size()
            << (g.is_undirected() ? ", undirected" : ", directed") << '\n';
  try {
    if (fl.alg2) {
      auto r = check_alg2_condition(g, fl.f);
      print_report("alg2 f=" + std::to_string(fl.f), r);
      ok = ok && r.satisfied();
    }
    if (fl.alg3 || (!fl.alg2 && !fl.k_strong)) {
      auto r = check_alg3_condition(g, fl.f);
      print_report("alg3 f=" + std::to_string(fl.f), r);
      ok = ok && r.satisfied();
    }
    if (fl.k_strong) {
      const bool s = is_k_strongly_connected(g, *fl.k_strong);
      std::cout << *fl.k_strong << "-strongly connected: " << (s ? "pass" : "fail") << '\n';
      ok = ok && s;
    }
  } catch (const InstanceTooLarge& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  }
  return ok ? kOk : kCheckFailed;
}

struct GenFlags {
  int layers = 0;
  int f = 1;
  std::string variant = "UndirectedPath";
  std::string out;
};

int cmd_gen_graph(const GenFlags& fl) {
  DirectedGraph g;
  try {
    g = generate_layered(fl.layers, fl.f, parse_layer_variant(fl.variant));
  } catch (const ArgumentError& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  }
  if (!check_alg3_condition(g, fl.f).satisfied()) {
    std::cerr << "generated graph fails its own condition check\n";
    return kGeneratorBug;
  }
  if (fl.out.empty() || fl.out == "-") {
    write_edge_list(std::cout, g);
  } else {
    std::ofstream out(fl.out);
    if (!out) {
      std::cerr << "cannot write '" << fl.out << "'\n";
      return kUnreadable;
    }
    write_edge_list(out, g);
  }
  return kOk;
}

// Runs every scenario carrying an expect block; one line per scenario.
int cmd_golden(const std::string& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.path().extension() == ".json") files.push_back(e.path());
  if (ec) {
    std::cerr << "cannot list '" << dir << "'\n";
    return kUnreadable;
  }
  std::sort(files.begin(), files.end());
  int failed = 0, ran = 0;
  for (const auto& p : files) {
    Scenario sc;
    try {
      sc = load_scenario(p.string());
    } catch (const ValidationError& e) {
      std::cout << "FAIL " << p.filename().string() << ": invalid";
      for (const auto& pr : e.problems()) std::cout << "; " << pr;
      std::cout << '\n';
      ++failed;
      continue;
    }
    if (!sc.expect) continue;
    ++ran;
    GoldenCheck c;
    double target = 0;
    if (sc.arithmetic == Arithmetic::Exact) {
      auto t = run<Rational>(sc);
      c = check_expectation(sc, t);
      target = t.target;
    } else {
      auto t = run<double>(sc);
      c = check_expectation(sc, t);
      target = t.target;
    }
    std::cout << (c.passed ? "PASS " : "FAIL ") << p.filename().string() << " target " << detail::fmt(target);
    for (const auto& f : c.failures) std::cout << "; " << f;
    std::cout << '\n';
    if (!c.passed) ++failed;
  }
  std::cout << ran << " scenarios, " << failed << " failed\n";
  return failed ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient average consensus simulator"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and export traces");
  run_cmd->add_option("--scenario", rf.scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--out", rf.out, "Output directory");
  run_cmd->add_option("--seed", rf.seed, "Override the scenario seed");
  run_cmd->add_flag("--exact", rf.exact, "Use exact rational arithmetic");
  run_cmd->add_option("--tol", rf.tol, "Convergence tolerance");

  CheckFlags cf;
  auto* check_cmd = app.add_subcommand("check-graph", "Check graph conditions");
  check_cmd->add_option("--graph", cf.graph, "Edge-list file")->required();
  check_cmd->add_option("--f", cf.f, "Adversary bound")->check(CLI::NonNegativeNumber);
  check_cmd->add_flag("--alg2", cf.alg2, "Check the Algorithm 2 condition");
  check_cmd->add_flag("--alg3", cf.alg3, "Check the Algorithm 3 condition (default)");
  check_cmd->add_option("--k-strong", cf.k_strong, "Also check k-strong connectivity");

  GenFlags gf;
  auto* gen_cmd = app.add_subcommand("gen-graph", "Generate a layered graph");
  gen_cmd->add_option("--layers", gf.layers, "Number of layers")->required();
  gen_cmd->add_option("--f", gf.f, "Adversary bound");
  gen_cmd->add_option("--variant", gf.variant, "UndirectedPath or DirectedWrap");
  gen_cmd->add_option("--out", gf.out, "Output file (stdout if omitted)");

  std::string golden_dir = "scenarios";
  auto* golden_cmd = app.add_subcommand("golden", "Run every golden scenario in a directory");
  golden_cmd->add_option("--dir", golden_dir, "Scenario directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (*run_cmd) return cmd_run(rf);
  if (*check_cmd) return cmd_check_graph(cf);
  if (*gen_cmd) return cmd_gen_graph(gf);
  if (*golden_cmd) return cmd_golden(golden_dir);
  return kInvalid;
}
