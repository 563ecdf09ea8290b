#include "shiftforge/cli_io.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "shiftforge/block_ops.hpp"
#include "shiftforge/coset_structure.hpp"
#include "shiftforge/decomposition.hpp"
#include "shiftforge/isg_embedding.hpp"
#include "shiftforge/sampler.hpp"

namespace shiftforge {

namespace {

std::string strip_code(const std::string& what) {
  auto pos = what.find(": ");
  return pos == std::string::npos ? what : what.substr(pos + 2);
}

// Runs `fn`, pinning any error it raises to `pointer` unless it already carries one.
template <typename F>
auto at_pointer(const std::string& pointer, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    std::string msg = strip_code(e.what());
    if (!msg.empty() && msg.front() == '/') throw;
    Errc code = e.code() == Errc::MalformedElement ? Errc::ParseError : e.code();
    throw Error(code, pointer + ": " + msg);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, pointer + ": " + e.what());
  }
}

void spot_check_group(const Group& g, std::size_t n) {
  auto xs = g.prefix(n);
  const Element id = g.identity();
  for (const auto& a : xs) {
    if (g.multiply(id, a) != a || g.multiply(a, id) != a)
      throw Error(Errc::ValidationError, "/alphabet: identity fails at " + g.label(a));
    if (g.multiply(a, g.inverse(a)) != id)
      throw Error(Errc::ValidationError, "/alphabet: inverse fails at " + g.label(a));
    for (const auto& b : xs)
      for (const auto& c : xs)
        if (g.multiply(g.multiply(a, b), c) != g.multiply(a, g.multiply(b, c)))
          throw Error(Errc::ValidationError, "/alphabet: associativity fails at (" + g.label(a) + ", " +
                                                 g.label(b) + ", " + g.label(c) + ")");
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, "/: " + std::string(e.what()));
  }
}

int exit_for(Errc c) {
  switch (c) {
    case Errc::ClosureViolation:
    case Errc::LawViolation:
    case Errc::ZeroDivisorDetected:
    case Errc::NotClosed:
    case Errc::WellDefinednessViolation:
    case Errc::NonUniquePreimage:
    case Errc::HypothesisViolated:
      return kViolation;
    case Errc::DepthExhausted:
    case Errc::NotMStep:
      return kInconclusive;
    default:
      return kInputError;
  }
}

const char* status_of(int code) {
  switch (code) {
    case kPass: return "pass";
    case kViolation: return "violation";
    case kInconclusive: return "inconclusive";
    default: return "error";
  }
}

Word parse_block(const Group& g, const std::string& text) {
  if (text.empty()) return {g.identity()};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, "--block: " + std::string(e.what()));
  }
  if (!j.is_array() || j.empty()) throw Error(Errc::ParseError, "--block must be a non-empty JSON array of letters");
  Word w;
  for (std::size_t i = 0; i < j.size(); ++i)
    w.push_back(at_pointer("--block/" + std::to_string(i), [&] { return g.decode(j[i]); }));
  return w;
}

// Admissible letters among the first `bound`.
std::vector<Element> letters_of(const ShiftPresentation& p, std::size_t bound) {
  std::vector<Element> out;
  for (auto& e : p.alphabet->prefix(bound))
    if (letter_in_alphabet(p, e)) out.push_back(std::move(e));
  return out;
}

std::string dot_path(const std::string& base, std::size_t i, std::size_t total) {
  if (total <= 1) return base;
  auto dot = base.rfind('.');
  auto slash = base.rfind('/');
  std::string tag = ".stage" + std::to_string(i);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return base + tag;
  return base.substr(0, dot) + tag + base.substr(dot);
}

// ---------------------------------------------------------------- commands

int cmd_verify(const RunConfig& c, const LoadedSpec& s, json& out) {
  const auto& p = *s.shift;
  int code = kPass;
  auto cl = verify_closure(p, c.bounds.bound, c.exec);
  out["closure"] = cl.to_json(*p.alphabet);
  if (!cl.closed) code = kViolation;
  auto xs = sample_sequences(p, 3 * c.bounds.samples, c.seed);
  auto ax = axiom_suite(p, xs, c.exec);
  out["axioms"] = ax.to_json();
  if (ax.violations()) code = kViolation;
  json laws = json::array();
  auto letters = letters_of(p, std::min<std::size_t>(c.bounds.bound, 8));
  try {
    for (std::size_t i = 0; i < letters.size(); ++i) {
      auto lr = coset_law_check(p, {letters[i]}, c.k, c.bounds.bound);
      auto pr = product_law_check(p, {letters[i]}, {letters[(i * 3 + 1) % letters.size()]}, c.k, c.bounds.bound);
      laws.push_back({{"block", json::array({p.alphabet->encode(letters[i])})},
                      {"coset_law", lr.to_json()},
                      {"product_law", pr.to_json()}});
      if (!lr.holds || !pr.holds) code = kViolation;
    }
    out["coset_laws"] = laws;
  } catch (const Error& e) {
    if (exit_for(e.code()) == kViolation) {
      out["coset_laws"] = {{"violation", {{"code", errc_name(e.code())}, {"message", strip_code(e.what())}}}};
      code = kViolation;
    } else if (exit_for(e.code()) == kInputError) {
      out["coset_laws"] = {{"skipped", strip_code(e.what())}};
    } else {
      throw;
    }
  }
  return code;
}

int cmd_classify(const RunConfig& c, const LoadedSpec& s, json& out) {
  const auto& p = *s.shift;
  auto cr = classify(p, std::max<std::size_t>(c.bounds.bound, 16));
  out["classification"] = cr.to_json();
  try {
    out["semigroup"] = classify_semigroup(p).to_json();
  } catch (const Error& e) {
    out["semigroup"] = {{"skipped", strip_code(e.what())}};
  }
  auto ct = continuity_check(p, c.bounds.bound);
  out["continuity"] = {{"continuous", ct.continuous}, {"reason", ct.reason}, {"witness", ct.witness}};
  return cr.m_step_stabilized ? kPass : kInconclusive;
}

int cmd_followers(const RunConfig& c, const LoadedSpec& s, json& out) {
  const auto& p = *s.shift;
  Word a = parse_block(*p.alphabet, c.block);
  json w = json::array();
  for (const auto& e : a) w.push_back(p.alphabet->encode(e));
  out["block"] = w;
  out["k"] = c.k;
  auto f = follower_set(p, a, c.k, c.bounds.bound);
  auto q = predecessor_set(p, a, c.k, c.bounds.bound);
  out["follower"] = f.to_json(*p.alphabet);
  out["predecessor"] = q.to_json(*p.alphabet);
  return (f.complete && q.complete) || f.coset || q.coset ? kPass : kInconclusive;
}

int cmd_classes(const RunConfig& c, const LoadedSpec& s, json& out) {
  const auto& p = *s.shift;
  auto fam = class_families(p, c.n, c.k, c.bounds.bound);
  out["n"] = c.n;
  out["k"] = c.k;
  out["follower"] = fam.follower.to_json(*p.alphabet);
  out["predecessor"] = fam.predecessor.to_json(*p.alphabet);
  if (!fam.follower.disjoint || !fam.follower.product_closed || !fam.predecessor.disjoint ||
      !fam.predecessor.product_closed)
    return kViolation;
  return fam.follower.stabilized && fam.predecessor.stabilized ? kPass : kInconclusive;
}

int cmd_op_check(const RunConfig& c, const LoadedSpec& s, json& out) {
  const auto& p = *s.shift;
  int code = kPass;
  json witnesses = json::array();
  auto cl = verify_closure(p, c.bounds.bound, c.exec);
  out["closure"] = cl.to_json(*p.alphabet);
  if (!cl.closed) {
    code = kViolation;
    witnesses.push_back({{"closure", out["closure"]["witness"]}});
  }
  auto xs = sample_sequences(p, 3 * c.bounds.samples, c.seed);
  auto ax = axiom_suite(p, xs, c.exec);
  out["axioms"] = ax.to_json();
  if (ax.violations()) {
    code = kViolation;
    for (const auto& w : ax.witnesses) witnesses.push_back(w);
  }
  try {
    out["classification"] = classify_semigroup(p).to_json();
  } catch (const Error& e) {
    out["classification"] = {{"skipped", strip_code(e.what())}};
  }
  auto ct = continuity_check(p, c.bounds.bound);
  out["continuity"] = {{"continuous", ct.continuous}, {"reason", ct.reason}, {"witness", ct.witness}};
  out["witnesses"] = witnesses;
  return code;
}

int cmd_decompose(const RunConfig& c, const LoadedSpec& s, json& out, RunResult& rr) {
  DecomposeOptions opt;
  opt.depth = c.bounds.depth;
  opt.seed = c.seed;
  opt.samples = c.bounds.samples;
  opt.transient = c.bounds.transient;
  opt.period = c.bounds.period;
  opt.exec = c.exec;
  auto r = decompose(s.shift, opt);
  out = r.to_json(true);
  rr.trace = r.trace;
  if (!c.emit_dot.empty()) {
    std::vector<ShiftPtr> stages{r.input};
    for (const auto& st : r.stages)
      stages.push_back(st.kind == StageRecord::Kind::Phi ? st.image->product()->left : st.after);
    json files = json::array();
    for (std::size_t i = 0; i < stages.size(); ++i) {
      auto path = dot_path(c.emit_dot, i, stages.size());
      rr.dot_files.emplace_back(path, emit_dot(*stages[i], c.bounds.bound, "stage" + std::to_string(i)));
      files.push_back(path);
    }
    out["dot_files"] = files;
  }
  std::size_t bad = r.composite.violations();
  for (const auto& sc : r.stage_checks) bad += sc.violations();
  return bad ? kViolation : kPass;
}

int cmd_embed(const RunConfig& c, json& out) {
  if (c.monoid_path.empty()) throw Error(Errc::ParseError, "embed needs --monoid");
  json j = read_json(c.monoid_path);
  auto s = at_pointer("", [&] { return monoid_from_json(j); });
  auto rep = verify_chain_hypotheses(s);
  out["monoid"] = s.descriptor;
  out["hypotheses"] = rep.to_json(s);
  if (!rep.all_pass()) return kViolation;
  auto cg = chain_group(s);
  out["chain_group"] = cg.group->describe();
  json th = json::array();
  for (std::size_t a = 0; a < s.size(); ++a)
    th.push_back({{"element", s.names[a]}, {"theta", sequence_to_json(*cg.group, embed_theta(s, cg, a))}});
  out["theta"] = th;
  auto ec = verify_embedding(s);
  out["embedding"] = ec.to_json();
  return ec.violations() ? kViolation : kPass;
}

int cmd_graph(const RunConfig& c, const LoadedSpec& s, json& out, RunResult& rr) {
  std::string dot = emit_dot(*s.shift, c.bounds.bound, s.name);
  if (!c.emit_dot.empty()) {
    rr.dot_files.emplace_back(c.emit_dot, dot);
    out["dot_file"] = c.emit_dot;
  }
  out["dot"] = dot;
  return kPass;
}

}  // namespace

json Bounds::to_json() const {
  return {{"bound", bound}, {"depth", depth}, {"samples", samples}, {"transient", transient}, {"period", period}};
}

std::size_t default_bound() {
  if (const char* v = std::getenv("SHIFTFORGE_DEFAULT_BOUND")) {
    char* end = nullptr;
    unsigned long long b = std::strtoull(v, &end, 10);
    if (end && *end == '\0' && b > 0) return static_cast<std::size_t>(b);
  }
  return 16;
}

LoadedSpec load_spec_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::ParseError, "/: spec must be an object");
  LoadedSpec s;
  s.name = j.value("name", std::string("spec"));
  if (!j.contains("alphabet")) throw Error(Errc::ParseError, "/alphabet: missing");
  if (!j.contains("shift")) throw Error(Errc::ParseError, "/shift: missing");
  s.alphabet = at_pointer("/alphabet", [&] { return group_from_json(j.at("alphabet")); });
  spot_check_group(*s.alphabet, 8);
  const json& sj = j.at("shift");
  if (sj.is_object() && sj.contains("subgroup"))
    at_pointer("/shift/subgroup", [&] { return subgroup_from_json(s.alphabet, sj.at("subgroup")); });
  s.shift = at_pointer("/shift", [&] { return shift_from_json(s.alphabet, sj); });
  s.options = j.value("options", json::object());
  return s;
}

LoadedSpec load_spec(const std::string& path) { return load_spec_json(read_json(path)); }

std::string emit_dot(const ShiftPresentation& p, std::size_t bound, const std::string& title) {
  const Group& g = *p.alphabet;
  std::vector<Element> nodes = letters_of(p, bound);
  std::map<Element, std::size_t> id;
  for (std::size_t i = 0; i < nodes.size(); ++i) id.emplace(nodes[i], i);
  const std::size_t inner = nodes.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < inner; ++i) {
    std::vector<Element> targets;
    bool exact = false;
    try {
      auto f = follower_set(p, {nodes[i]}, 1, bound);
      if (f.coset && f.coset->subgroup->is_finite() && f.coset->subgroup->elements().size() <= 16) {
        const auto& bg = *f.coset->subgroup->parent();
        for (const auto& h : f.coset->subgroup->elements()) targets.push_back(unflatten(bg.multiply(f.coset->rep, h), g.arity()).front());
        exact = true;
      } else if (!f.coset && f.complete && f.elements.size() <= 16) {
        for (const auto& w : f.elements) targets.push_back(w.front());
        exact = true;
      }
    } catch (const Error&) {
      exact = false;
    }
    if (!exact) {
      for (const auto& b : nodes)
        if (transition_allowed(p, nodes[i], b)) targets.push_back(b);
    }
    std::sort(targets.begin(), targets.end(), [&](const Element& a, const Element& b) { return g.ordinal(a) < g.ordinal(b); });
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (const auto& b : targets) {
      auto [it, fresh] = id.emplace(b, nodes.size());
      if (fresh) nodes.push_back(b);
      edges.emplace_back(i, it->second);
    }
  }
  std::ostringstream o;
  o << "digraph \"" << title << "\" {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string label = g.encode(nodes[i]).dump();
    std::string esc;
    for (char ch : label) {
      if (ch == '"' || ch == '\\') esc += '\\';
      esc += ch;
    }
    o << "  n" << i << " [label=\"" << esc << "\"" << (i >= inner ? ", style=dashed" : "") << "];\n";
  }
  for (const auto& [a, b] : edges) o << "  n" << a << " -> n" << b << ";\n";
  o << "}\n";
  return o.str();
}

RunResult run(const RunConfig& c) {
  RunResult rr;
  json report{{"schema_version", kSchemaVersion},
              {"command", c.command},
              {"seed", c.seed},
              {"bounds", c.bounds.to_json()},
              {"k", c.k},
              {"n", c.n}};
  json result = json::object();
  try {
    if (c.bounds.bound == 0 || c.bounds.depth == 0 || c.bounds.samples == 0)
      throw Error(Errc::ValidationError, "bounds must be positive");
    if (c.command == "embed") {
      report["monoid_path"] = c.monoid_path;
      rr.exit_code = cmd_embed(c, result);
    } else {
      if (c.spec_path.empty()) throw Error(Errc::ParseError, c.command + " needs --spec");
      auto s = load_spec(c.spec_path);
      report["spec"] = s.name;
      if (c.command == "verify") rr.exit_code = cmd_verify(c, s, result);
      else if (c.command == "classify") rr.exit_code = cmd_classify(c, s, result);
      else if (c.command == "followers") rr.exit_code = cmd_followers(c, s, result);
      else if (c.command == "classes") rr.exit_code = cmd_classes(c, s, result);
      else if (c.command == "op-check") rr.exit_code = cmd_op_check(c, s, result);
      else if (c.command == "decompose") rr.exit_code = cmd_decompose(c, s, result, rr);
      else if (c.command == "graph") rr.exit_code = cmd_graph(c, s, result, rr);
      else throw Error(Errc::ParseError, "unknown command " + c.command);
    }
  } catch (const Error& e) {
    rr.exit_code = exit_for(e.code());
    report["error"] = {{"code", errc_name(e.code())}, {"message", strip_code(e.what())}};
  } catch (const std::exception& e) {
    rr.exit_code = kInputError;
    report["error"] = {{"code", "Internal"}, {"message", e.what()}};
  }
  report["result"] = result;
  report["status"] = status_of(rr.exit_code);
  report["exit_code"] = rr.exit_code;
  rr.report = std::move(report);
  return rr;
}

}  // namespace shiftforge
