#pragma once

#include <optional>
#include <vector>

#include "shiftforge/shift_space.hpp"

namespace shiftforge {

enum class Side { Follower, Predecessor };

// F_k(Lambda, 1^n) or P_k(Lambda, 1^n) as a subgroup of the block group G^k.
// Throws NotClosed when the set fails the subgroup test up to `bound`.
SubgroupPtr follower_subgroup(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound = 16);
SubgroupPtr predecessor_subgroup(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound = 16);

// F_k(Lambda, a) (or P_k) as a coset of the matching identity subgroup.
Coset follower_coset(const ShiftPresentation& p, const Word& a, std::size_t k, Side side = Side::Follower,
                     std::size_t bound = 16);

struct SubgroupCheck {
  bool closed = true;
  bool normal = true;
  bool exact = false;
  std::size_t bound = 0;
  json witness;
  json to_json() const;
};
SubgroupCheck check_subgroup(const SubgroupHandle& h, std::size_t bound);

struct LawReport {
  bool holds = true;
  std::size_t exact_checks = 0;
  std::size_t brute_checks = 0;
  std::size_t bound = 0;
  json witness;
  json to_json() const;
};
// b F_k(1^n) = F_k(1^n) b = F_k(a) for sampled b in F_k(a), by coset algebra and by
// brute-force window search over the first `bound` letters.
LawReport coset_law_check(const ShiftPresentation& p, const Word& a, std::size_t k, std::size_t bound = 16);
// F_k(a) F_k(b) = F_k(a b).
LawReport product_law_check(const ShiftPresentation& p, const Word& a, const Word& b, std::size_t k,
                            std::size_t bound = 16);

struct ClassFamily {
  std::size_t n = 0, k = 0;
  Side side = Side::Follower;
  SubgroupPtr base;
  std::vector<Coset> classes;
  std::vector<Word> sources;  // a block producing each class
  std::size_t letter_bound = 0;
  bool complete = false;    // every block was visited
  bool stabilized = false;  // same count with twice the letters
  bool disjoint = true;
  bool product_closed = true;
  json to_json(const Group& g) const;
};

struct ClassFamilies {
  ClassFamily follower, predecessor;
};
ClassFamilies class_families(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound = 16);
ClassFamily class_family(const ShiftPresentation& p, std::size_t n, std::size_t k, Side side, std::size_t bound);

struct TauReport {
  std::size_t classes = 0;
  std::size_t targets = 0;
  bool well_defined = true;
  bool injective = true;
  bool multiplicative = true;
  bool sizes_match = true;
  std::vector<std::pair<std::size_t, Coset>> mapping;  // class index -> P_n(b)
  json witness;
  json to_json(const Group& g) const;
};
// tau: F_k(a) -> P_n(b) for b in F_k(a). Throws WellDefinednessViolation when two
// representatives of one class disagree.
TauReport tau_bijection(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound = 16);

}  // namespace shiftforge
