#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rac/adversary.hpp"
#include "rac/errors.hpp"
#include "rac/graph.hpp"
#include "rac/graph_io.hpp"
#include "rac/sim.hpp"

namespace rac {

namespace detail {

using nlohmann::json;

class Problems {
 public:
  void add(std::string p) { list_.push_back(std::move(p)); }
  bool empty() const { return list_.empty(); }
  std::vector<std::string>& list() { return list_; }

 private:
  std::vector<std::string> list_;
};

template <class T>
bool read_field(const json& j, const char* key, T& out, Problems& pr, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return false;
  try {
    out = it->template get<T>();
    return true;
  } catch (const json::exception&) {
    pr.add(where + key + ": wrong type");
    return false;
  }
}

inline DirectedGraph parse_graph(const json& j, const std::filesystem::path& base, Problems& pr) {
  if (!j.is_object()) {
    pr.add("graph: expected an object");
    return {};
  }
  try {
    if (j.contains("file")) {
      auto path = std::filesystem::path(j.at("file").get<std::string>());
      if (path.is_relative()) path = base / path;
      return read_edge_list_file(path.string());
    }
    if (j.contains("layers")) {
      const auto variant = parse_layer_variant(j.value("variant", std::string("UndirectedPath")));
      if (j.contains("sizes")) {
        auto sizes = j.at("sizes").get<std::vector<int>>();
        return generate_layered_sizes(sizes, variant);
      }
      return generate_layered(j.at("layers").get<int>(), j.value("f", 1), variant);
    }
    if (j.contains("complete")) return DirectedGraph::complete(j.at("complete").get<int>());
    const int n = j.at("n").get<int>();
    const bool undirected = j.value("undirected", false);
    std::vector<Edge> edges;
    for (const auto& e : j.value("edges", json::array())) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::vector<Edge> directed;
    for (const auto& e : j.value("directed_edges", json::array()))
      directed.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    if (!undirected) {
      edges.insert(edges.end(), directed.begin(), directed.end());
      return DirectedGraph(n, edges, false);
    }
    if (directed.empty()) return DirectedGraph::undirected_from(n, edges);
    // Mixed: undirected pairs plus one-way edges; the result is directed.
    std::vector<Edge> all;
    for (auto [a, b] : edges) {
      all.emplace_back(a, b);
      all.emplace_back(b, a);
    }
    all.insert(all.end(), directed.begin(), directed.end());
    return DirectedGraph(n, all, false);
  } catch (const json::exception& e) {
    pr.add(std::string("graph: ") + e.what());
  } catch (const std::exception& e) {
    pr.add(std::string("graph: ") + e.what());
  }
  return {};
}

inline AttackAction parse_action(const json& j, Problems& pr, const std::string& where) {
  AttackAction a;
  std::string kind;
  if (!read_field(j, "action", kind, pr, where)) {
    pr.add(where + "action: missing");
    return a;
  }
  try {
    a.kind = parse_action_kind(kind);
  } catch (const ArgumentError& e) {
    pr.add(where + e.what());
    return a;
  }
  read_field(j, "target", a.target, pr, where);
  read_field(j, "amount", a.value, pr, where);
  if (j.contains("value") && !j.at("value").is_string()) read_field(j, "value", a.value, pr, where);
  read_field(j, "gam_value", a.gam_value, pr, where);
  read_field(j, "degree", a.degree, pr, where);
  std::string mode;
  if (read_field(j, "mode", mode, pr, where)) {
    if (mode == "set") {
      a.mode = TamperMode::Set;
    } else if (mode == "offset") {
      a.mode = TamperMode::Offset;
    } else {
      pr.add(where + "mode: expected 'set' or 'offset'");
    }
  }
  if (j.contains("value") && j.at("value").is_string()) {
    if (j.at("value").get<std::string>() == "random") {
      a.random = true;
    } else {
      pr.add(where + "value: expected a number or 'random'");
    }
  }
  std::vector<double> range;
  if (read_field(j, "range", range, pr, where)) {
    if (range.size() == 2) {
      a.low = range[0];
      a.high = range[1];
    } else {
      pr.add(where + "range: expected [low, high]");
    }
  }
  return a;
}

}  // namespace detail

// Parses and validates; throws ValidationError listing every problem found.
inline Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base = ".") {
  using detail::read_field;
  detail::Problems pr;
  Scenario sc;
  if (!j.is_object()) throw ValidationError({"scenario: expected a JSON object"});
  read_field(j, "name", sc.name, pr, "");
  if (j.contains("graph")) {
    sc.graph = detail::parse_graph(j.at("graph"), base, pr);
  } else {
    pr.add("graph: missing");
  }
  if (!read_field(j, "x0", sc.x0, pr, "")) {
    if (!j.contains("x0")) pr.add("x0: missing");
  }
  read_field(j, "f", sc.f, pr, "");
  std::string s;
  if (read_field(j, "model", s, pr, "")) {
    if (s == "Total") {
      sc.model = AdversaryKind::Total;
    } else if (s == "Local") {
      sc.model = AdversaryKind::Local;
    } else {
      pr.add("model: expected Total or Local");
    }
  }
  if (read_field(j, "detection", s, pr, "")) {
    if (s == "None") {
      sc.detection = DetectionMode::None;
    } else if (s == "Alg2") {
      sc.detection = DetectionMode::Alg2;
    } else if (s == "Alg3") {
      sc.detection = DetectionMode::Alg3;
    } else {
      pr.add("detection: expected None, Alg2 or Alg3");
    }
  }
  read_field(j, "sharing_oracle", sc.sharing_oracle, pr, "");
  read_field(j, "horizon", sc.horizon, pr, "");
  read_field(j, "tol", sc.tol, pr, "");
  read_field(j, "seed", sc.seed, pr, "");
  read_field(j, "eq_tol", sc.protocol.eq_tol, pr, "");
  read_field(j, "z_floor", sc.protocol.z_floor, pr, "");
  std::vector<double> interval;
  if (read_field(j, "safety_interval", interval, pr, "")) {
    if (interval.size() == 2) {
      sc.safety_interval = std::make_pair(interval[0], interval[1]);
    } else {
      pr.add("safety_interval: expected [low, high]");
    }
  }
  if (read_field(j, "arithmetic", s, pr, "")) {
    if (s == "Float") {
      sc.arithmetic = Arithmetic::Float;
    } else if (s == "Exact") {
      sc.arithmetic = Arithmetic::Exact;
    } else {
      pr.add("arithmetic: expected Float or Exact");
    }
  }
  if (j.contains("adversaries")) {
    if (!j.at("adversaries").is_array()) {
      pr.add("adversaries: expected an array");
    } else {
      int idx = 0;
      for (const auto& a : j.at("adversaries")) {
        const std::string where = "adversaries[" + std::to_string(idx++) + "].";
        AttackScript script;
        if (!read_field(a, "node", script.node, pr, where)) pr.add(where + "node: missing");
        int partner = 0;
        if (read_field(a, "collusion_partner", partner, pr, where)) script.collusion_partner = partner;
        if (a.contains("schedule")) {
          int e = 0;
          for (const auto& entry : a.at("schedule")) {
            const std::string w2 = where + "schedule[" + std::to_string(e++) + "].";
            int from = 0;
            if (!read_field(entry, "from", from, pr, w2)) pr.add(w2 + "from: missing");
            script.schedule.emplace_back(from, detail::parse_action(entry, pr, w2));
          }
        }
        sc.adversaries.push_back(std::move(script));
      }
    }
  }
  if (j.contains("expect")) {
    const auto& e = j.at("expect");
    Expectation ex;
    read_field(e, "target", ex.target, pr, "expect.");
    read_field(e, "target_tol", ex.target_tol, pr, "expect.");
    double fv = 0;
    if (read_field(e, "final", fv, pr, "expect.")) ex.final_value = fv;
    read_field(e, "final_tol", ex.final_tol, pr, "expect.");
    sc.expect = ex;
  }
  if (sc.graph.node_count() > 0 || pr.empty())
    for (auto& p : scenario_problems(sc)) pr.add(std::move(p));
  if (!pr.empty()) throw ValidationError(std::move(pr.list()));
  return sc;
}

// Throws std::runtime_error when the file cannot be read, ValidationError
// for malformed JSON or invalid content.
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({std::string("malformed JSON: ") + e.what()});
  }
  return parse_scenario(j, std::filesystem::path(path).parent_path());
}

template <class S>
void write_trace_csv(std::ostream& out, const Trace<S>& t) {
  out << "round,node,y,z,ratio,detected_count\n";
  for (int k = 0; k <= t.horizon(); ++k)
    for (NodeId i = 1; i <= t.n; ++i) {
      const auto& r = t.at(k, i);
      out << k << ',' << i << ',' << detail::fmt(to_double(r.y)) << ',' << detail::fmt(to_double(r.z)) << ','
          << detail::fmt(to_double(r.ratio)) << ',' << r.detected_count << '\n';
    }
}

template <class S>
void write_events_csv(std::ostream& out, const Trace<S>& t) {
  out << "round,detector,suspect,cause\n";
  for (const auto& e : t.events) out << e.round << ',' << e.detector << ',' << e.suspect << ',' << to_string(e.cause) << '\n';
}

template <class S>
nlohmann::json summary_json(const Scenario& sc, const Trace<S>& t) {
  nlohmann::json j;
  j["name"] = sc.name;
  j["nodes"] = t.n;
  j["horizon"] = t.horizon();
  j["arithmetic"] = sc.arithmetic == Arithmetic::Exact ? "Exact" : "Float";
  j["target"] = t.target;
  j["never_detected"] = std::vector<int>(t.never_detected.begin(), t.never_detected.end());
  j["adversaries"] = std::vector<int>(t.adversaries.begin(), t.adversaries.end());
  j["settle_round"] = t.settle_round;
  j["converged_round"] = t.converged_round ? nlohmann::json(*t.converged_round) : nlohmann::json(nullptr);
  j["events"] = t.events.size();
  j["low_mass_events"] = t.low_mass.size();
  double worst = 0;
  for (NodeId i = 1; i <= t.n; ++i)
    if (t.is_normal(i)) worst = std::max(worst, std::fabs(to_double(t.at(t.horizon(), i).ratio) - t.target));
  j["final_max_error"] = worst;
  return j;
}

struct GoldenCheck {
  bool passed = true;
  std::vector<std::string> failures;
};

template <class S>
GoldenCheck check_expectation(const Scenario& sc, const Trace<S>& t) {
  GoldenCheck g;
  if (!sc.expect) return g;
  const auto& e = *sc.expect;
  if (std::fabs(t.target - e.target) > e.target_tol) {
    g.passed = false;
    g.failures.push_back("target " + detail::fmt(t.target) + " != expected " + detail::fmt(e.target));
  }
  const double want = e.final_value.value_or(e.target);
  for (NodeId i = 1; i <= t.n; ++i) {
    if (!t.is_normal(i)) continue;
    const double r = to_double(t.at(t.horizon(), i).ratio);
    if (std::fabs(r - want) > e.final_tol) {
      g.passed = false;
      g.failures.push_back("node " + std::to_string(i) + " ends at " + detail::fmt(r) + ", expected " +
                           detail::fmt(want));
    }
  }
  return g;
}

}  // namespace rac
