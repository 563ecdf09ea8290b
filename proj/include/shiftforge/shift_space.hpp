#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shiftforge/group.hpp"
#include "shiftforge/sequence.hpp"
#include "shiftforge/sliding_code.hpp"

namespace shiftforge {

struct ShiftPresentation;
using ShiftPtr = std::shared_ptr<const ShiftPresentation>;

// Exact follower/predecessor oracle: coset of the length-k words inside the block group G^k.
using CosetOracle = std::function<Coset(const Word& a, std::size_t k)>;

struct FullShift {};

struct MarkovCoset {
  SubgroupPtr n;
  HomPtr f;  // transition a -> b allowed iff b N = f(a)
};

struct PredicateMStep {
  int m = 1;
  std::string name;
  std::function<bool(const Word&)> allowed;  // windows of length m+1
  CosetOracle follower;
  CosetOracle predecessor;
};

struct EdgeGraph {
  struct Edge {
    Element label;
    std::string source, target;
  };
  std::vector<Edge> edges;
  std::map<Element, std::size_t> by_label;
};

struct ProductShift {
  ShiftPtr left, right;
};

// Membership-only: periodic points together with the empty sequence.
struct PeriodicPoints {};

struct ShiftPresentation {
  std::string name;
  GroupPtr alphabet;
  Axis axis = Axis::TwoSided;
  std::variant<FullShift, MarkovCoset, PredicateMStep, EdgeGraph, ProductShift, PeriodicPoints> body;
  json descriptor;

  const MarkovCoset* markov() const { return std::get_if<MarkovCoset>(&body); }
  const PredicateMStep* predicate() const { return std::get_if<PredicateMStep>(&body); }
  const EdgeGraph* edge_graph() const { return std::get_if<EdgeGraph>(&body); }
  const ProductShift* product() const { return std::get_if<ProductShift>(&body); }
  bool is_full() const { return std::holds_alternative<FullShift>(body); }
  bool is_periodic_points() const { return std::holds_alternative<PeriodicPoints>(body); }
};

ShiftPtr make_full_shift(GroupPtr g, Axis axis);
ShiftPtr make_markov_coset(GroupPtr g, Axis axis, SubgroupPtr n, HomPtr f, std::string name = "markov_coset");
// x_{i+m} in x_i K for every i.
ShiftPtr make_coset_step_shift(GroupPtr g, Axis axis, int m, SubgroupPtr k, std::string name);
ShiftPtr make_edge_graph(GroupPtr g, Axis axis, std::vector<EdgeGraph::Edge> edges);
ShiftPtr make_periodic_points(GroupPtr g, Axis axis);
ShiftPtr product_shift(const ShiftPtr& p, const ShiftPtr& q);
ShiftPtr shift_from_json(GroupPtr g, const json& j);

std::size_t window_size(const ShiftPresentation& p);
bool letter_in_alphabet(const ShiftPresentation& p, const Element& a);
// Every window of w is allowed.
bool in_language(const ShiftPresentation& p, const Word& w);
// Only the windows ending at the last letter of w.
bool last_window_allowed(const ShiftPresentation& p, const Word& w);
bool transition_allowed(const ShiftPresentation& p, const Element& a, const Element& b);
bool letters_infinite(const ShiftPresentation& p);
bool space_finite(const ShiftPresentation& p);
bool contains(const ShiftPresentation& p, const Sequence& x);

struct FollowerResult {
  enum class Kind { Explicit, CosetSet, CosetChain };
  Kind kind = Kind::Explicit;
  std::optional<Coset> coset;
  std::vector<Word> elements;
  bool complete = true;
  std::size_t bound = 0;

  bool contains(const Word& b) const;
  // Cardinality when known to be finite.
  std::optional<std::size_t> size() const;
  bool infinite() const;
  json to_json(const Group& g) const;
};

FollowerResult follower_set(const ShiftPresentation& p, const Word& a, std::size_t k, std::size_t bound = 16);
FollowerResult predecessor_set(const ShiftPresentation& p, const Word& a, std::size_t k,
                               std::size_t bound = 16);
// Brute force over the first `bound` letters using window checks only.
FollowerResult bounded_followers(const ShiftPresentation& p, const Word& a, std::size_t k, std::size_t bound);
FollowerResult bounded_predecessors(const ShiftPresentation& p, const Word& a, std::size_t k,
                                    std::size_t bound);

struct Language {
  std::vector<Word> words;
  bool complete = false;
  std::size_t bound = 0;
};
Language language(const ShiftPresentation& p, std::size_t n, std::size_t bound);

struct ClassifyReport {
  bool row_finite = false;
  std::optional<bool> column_finite;
  bool column_certified = false;
  Index m_step = 0;
  bool m_step_stabilized = true;
  std::size_t m_search_cap = 0;
  bool is_edge_shift = false;
  bool is_sft = false;
  bool letters_infinite = false;
  bool space_finite = false;
  json to_json() const;
};
ClassifyReport classify(const ShiftPresentation& p, std::size_t bound = 64, std::size_t m_cap = 32);

// Subgroup F_1(Lambda, 1^m) of the alphabet.
SubgroupPtr identity_follower_subgroup(const ShiftPresentation& p, std::size_t m, std::size_t bound = 16);
bool subgroups_agree(const SubgroupHandle& a, const SubgroupHandle& b, std::size_t bound);

// Letter with no follower or no predecessor among the first `bound` letters.
std::optional<Element> source_sink_witness(const ShiftPresentation& p, std::size_t bound);

struct HigherBlock {
  ShiftPtr shift;
  SlidingCode forward;  // memory M-1: y_i = (x_{i-M+1}, ..., x_i)
  SlidingCode inverse;  // 1-block: last coordinate
};
HigherBlock higher_block(const ShiftPtr& p, std::size_t m);

}  // namespace shiftforge
