#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "shiftforge/group.hpp"
#include "shiftforge/sequence.hpp"

namespace shiftforge {

// Finite monoid given by its multiplication table over element indices.
struct AbstractInverseMonoid {
  std::string name;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> table;
  std::size_t zero = 0;
  std::vector<std::size_t> t;                 // the endomorphism T
  std::vector<std::size_t> declared_chain;    // optional, e_0 first
  json descriptor;

  std::size_t size() const { return names.size(); }
  std::size_t mul(std::size_t a, std::size_t b) const { return table[a][b]; }
  bool idempotent(std::size_t a) const { return table[a][a] == a; }
  std::optional<std::size_t> star(std::size_t a) const;  // unique b with aba = a, bab = b
  std::size_t index_of(const std::string& n) const;
};

// Words of length 0..max_length over g with entrywise product truncated to the shorter word.
// The empty word is the zero and T drops the first letter.
AbstractInverseMonoid truncated_sequence_monoid(const GroupPtr& g, std::size_t max_length,
                                                std::string name = "truncated");
AbstractInverseMonoid monoid_from_json(const json& j);

struct HypothesisCheck {
  enum class Status { Pass, Fail, Skipped };
  int number = 0;
  std::string statement;
  Status status = Status::Skipped;
  std::string note;
  json counterexample;
};
const char* status_name(HypothesisCheck::Status s);

struct ChainReport {
  bool inverse_monoid = false;
  std::string inverse_failure;
  std::optional<std::size_t> identity;
  std::vector<std::size_t> chain;  // e_0 .. e_k when hypothesis 2 holds
  std::array<HypothesisCheck, 5> hypotheses;
  bool t_surjective = false;
  bool all_pass() const;
  json to_json(const AbstractInverseMonoid& s) const;
};
ChainReport verify_chain_hypotheses(const AbstractInverseMonoid& s);

struct ChainGroup {
  GroupPtr group;                   // e_1 first, so it is the identity
  std::vector<std::size_t> members; // monoid indices of e_1 s
  std::vector<std::size_t> to_group;  // monoid index -> group index, or npos
  std::size_t e1 = 0;
  std::vector<std::size_t> chain;
};
// Throws HypothesisViolated unless every hypothesis passes.
ChainGroup chain_group(const AbstractInverseMonoid& s);

// (e_1 x, e_1 T x, ...) stopped before the first T^i x = e_0; eventually periodic if T cycles.
Sequence embed_theta(const AbstractInverseMonoid& s, const ChainGroup& cg, std::size_t x);
// Number of letters of theta(x); nullopt if infinite.
std::optional<std::size_t> theta_letters(const AbstractInverseMonoid& s, std::size_t x);

struct EmbeddingCheck {
  std::size_t elements = 0, pairs = 0, group_order = 0;
  std::size_t injective = 0, multiplicative = 0, shift = 0, lr_law = 0, star_law = 0, class_groups = 0;
  bool image_shift_invariant = false;
  bool image_is_shift_space = false;
  std::string image_note;
  std::vector<json> witnesses;
  std::size_t violations() const {
    return injective + multiplicative + shift + lr_law + star_law + class_groups;
  }
  json to_json() const;
};
EmbeddingCheck verify_embedding(const AbstractInverseMonoid& s);

}  // namespace shiftforge
