#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rac {

// Bad input to an operation (invalid node id, out-of-range parameter).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation is not defined for this kind of input (e.g. a directed graph
// handed to an undirected-only checker).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exhaustive enumeration refused because the node count exceeds the cap.
class InstanceTooLarge : public std::runtime_error {
 public:
  InstanceTooLarge(int n, int cap)
      : std::runtime_error("instance too large: " + std::to_string(n) +
                           " nodes exceeds enumeration cap " +
                           std::to_string(cap)),
        nodes(n),
        cap(cap) {}
  int nodes;
  int cap;
};

// Scenario validation failure; carries every problem found, not just the
// first one.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string out = "scenario validation failed";
    for (const auto& p : ps) out += "\n  - " + p;
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace rac
