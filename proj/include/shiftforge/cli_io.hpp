#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "shiftforge/parallel.hpp"
#include "shiftforge/shift_space.hpp"

namespace shiftforge {

constexpr int kSchemaVersion = 1;

// Exit codes of `run`.
enum ExitCode : int { kPass = 0, kViolation = 1, kInconclusive = 2, kInputError = 3 };

struct Bounds {
  std::size_t bound = 16;  // letters enumerated per search
  std::size_t depth = 8;
  std::size_t samples = 128;
  std::size_t transient = 4;
  std::size_t period = 4;
  json to_json() const;
};

// 16 unless SHIFTFORGE_DEFAULT_BOUND holds a positive integer.
std::size_t default_bound();

struct RunConfig {
  std::string command;
  std::string spec_path;
  std::string monoid_path;
  std::uint64_t seed = 42;
  Bounds bounds;
  std::size_t k = 1, n = 1;
  std::string block;     // JSON word, e.g. "[0]"
  std::string emit_dot;  // path, empty for none
  std::string out;       // report path, empty for stdout
  Exec exec = Exec::Parallel;
};

struct LoadedSpec {
  std::string name;
  GroupPtr alphabet;
  ShiftPtr shift;
  json options;
};
// ParseError / ValidationError messages start with the JSON pointer of the offending node.
LoadedSpec load_spec(const std::string& path);
LoadedSpec load_spec_json(const json& j);

// Nodes are the admissible letters among the first `bound`; edges are allowed transitions.
// A finite follower set reaching past the bound adds dashed frontier nodes.
std::string emit_dot(const ShiftPresentation& p, std::size_t bound, const std::string& title = "shift");

struct RunResult {
  int exit_code = kPass;
  json report;
  std::vector<std::pair<std::string, std::string>> dot_files;  // path, contents
  std::vector<std::string> trace;                              // human-readable lines
};
RunResult run(const RunConfig& c);

}  // namespace shiftforge
