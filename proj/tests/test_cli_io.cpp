#include <doctest.h>

#include <map>
#include <regex>
#include <sstream>

#include "common.hpp"

using namespace shiftforge;

namespace {

struct Dot {
  std::map<std::string, std::string> labels;
  std::set<std::string> dashed;
  std::map<std::string, std::vector<std::string>> out;
};

Dot parse_dot(const std::string& text) {
  Dot d;
  std::regex node(R"re(^\s*(n\d+) \[label="([^"]*)"(, style=dashed)?\];)re");
  std::regex edge(R"re(^\s*(n\d+) -> (n\d+);)re");
  std::istringstream in(text);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_search(line, m, node)) {
      d.labels[m[1]] = m[2];
      if (m[3].matched) d.dashed.insert(m[1]);
    } else if (std::regex_search(line, m, edge)) {
      d.out[m[1]].push_back(m[2]);
    }
  }
  return d;
}

RunConfig config(const std::string& command, const std::string& spec) {
  RunConfig c;
  c.command = command;
  if (!spec.empty()) c.spec_path = testutil::fixture_path(spec);
  c.exec = Exec::Serial;
  return c;
}

std::string error_message(const json& j) {
  try {
    load_spec_json(j);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("loading fixtures") {
  auto z4 = testutil::fixture("z4_coset.json");
  CHECK(z4.name == "z4_coset");
  CHECK(z4.alphabet->order() == std::optional<std::size_t>(4));
  REQUIRE(z4.shift->markov());

  auto pf = testutil::fixture("prufer_fractal.json");
  CHECK(pf.alphabet->kind() == "prufer2");
  REQUIRE(pf.shift->markov());
}

TEST_CASE("load errors carry the JSON pointer") {
  try {
    testutil::fixture("not_closed_subgroup.json");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ValidationError);
    CHECK(std::string(e.what()).find("/shift/subgroup") != std::string::npos);
  }
  CHECK(error_message(json::parse(R"({"shift":{"kind":"full"}})")).find("/alphabet") != std::string::npos);
  CHECK(error_message(json::parse(R"({"alphabet":{"kind":"int"}})")).find("/shift") != std::string::npos);
  CHECK(error_message(json::parse(R"({"alphabet":{"kind":"int"},"shift":{"kind":"warp"}})")).find("/shift") !=
        std::string::npos);
  CHECK_THROWS_AS(load_spec(testutil::fixture_path("no_such_file.json")), Error);
}

TEST_CASE("dot graphs") {
  auto z4 = parse_dot(emit_dot(*testutil::fixture("z4_coset.json").shift, 16));
  CHECK(z4.labels.size() == 4);
  for (const auto& [n, label] : z4.labels) {
    REQUIRE(z4.out[n].size() == 2);
    // Oracle: a -> b iff b - a is even.
    for (const auto& t : z4.out[n]) CHECK((std::stoi(z4.labels[t]) - std::stoi(label)) % 2 == 0);
  }

  auto id2 = parse_dot(emit_dot(*testutil::fixture("identity_z2.json").shift, 16));
  CHECK(id2.labels.size() == 2);
  for (const auto& [n, targets] : id2.out) CHECK(targets == std::vector<std::string>{n});

  auto pf = parse_dot(emit_dot(*testutil::fixture("prufer_fractal.json").shift, 7));
  std::size_t solid = 0;
  for (const auto& [n, label] : pf.labels) {
    if (pf.dashed.count(n)) continue;
    ++solid;
    REQUIRE(pf.out[n].size() == 2);
    // Oracle: g/2^i is followed by g/2^(i+1) and (g + 2^i)/2^(i+1); 0 by 0 and 1/2.
    long long g = 0, i = 0;
    std::sscanf(label.c_str(), "[%lld,%lld]", &g, &i);
    std::set<std::string> want = g == 0 ? std::set<std::string>{"[0,1]", "[1,1]"}
                                        : std::set<std::string>{"[" + std::to_string(g) + "," + std::to_string(i + 1) + "]",
                                                                "[" + std::to_string(g + (1LL << i)) + "," +
                                                                    std::to_string(i + 1) + "]"};
    std::set<std::string> got;
    for (const auto& t : pf.out[n]) got.insert(pf.labels[t]);
    CHECK(got == want);
  }
  CHECK(solid == 7);
}

TEST_CASE("command exit codes") {
  CHECK(run(config("verify", "z4_coset.json")).exit_code == kPass);

  auto broken = run(config("verify", "broken_closure.json"));
  CHECK(broken.exit_code == kViolation);
  CHECK(broken.report["result"]["closure"]["closed"] == false);
  CHECK(broken.report["result"]["closure"].contains("witness"));

  auto dz4 = run(config("decompose", "z4_coset.json"));
  CHECK(dz4.exit_code == kPass);
  CHECK(dz4.report["result"]["h_list"].size() == 1);

  CHECK(run(config("decompose", "parity.json")).exit_code == kInputError);
  CHECK(run(config("verify", "not_closed_subgroup.json")).exit_code == kInputError);

  auto e = config("embed", "");
  e.monoid_path = testutil::fixture_path("monoid_truncated_z2.json");
  CHECK(run(e).exit_code == kPass);
  e.monoid_path = testutil::fixture_path("monoid_incomparable.json");
  CHECK(run(e).exit_code == kViolation);

  auto cls = config("classes", "parity.json");
  cls.n = 2;
  cls.k = 2;
  auto cr = run(cls);
  CHECK(cr.exit_code == kPass);

  auto fol = config("followers", "prufer_fractal.json");
  fol.block = "[[0,1]]";
  CHECK(run(fol).exit_code == kPass);
  fol.block = "[[0,1],[1,2]]";
  CHECK(run(fol).exit_code == kInputError);
}

TEST_CASE("reports are deterministic and independent of the executor") {
  for (const char* cmd : {"verify", "classify", "graph"}) {
    auto a = config(cmd, "prufer_fractal.json");
    a.emit_dot = "graph.dot";
    auto r1 = run(a);
    auto r2 = run(a);
    a.exec = Exec::Parallel;
    auto r3 = run(a);
    CHECK(r1.report.dump() == r2.report.dump());
    CHECK(r1.report.dump() == r3.report.dump());
    CHECK(r1.dot_files == r2.dot_files);
    CHECK(r1.report["schema_version"] == kSchemaVersion);
    CHECK_FALSE(r1.report.dump().find("time") != std::string::npos);
  }
}
