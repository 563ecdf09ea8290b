#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shiftforge/parallel.hpp"
#include "shiftforge/shift_space.hpp"

namespace shiftforge {

// A binary operation on an enumerated letter set. A nullopt product is a zero divisor.
struct AlphabetOp {
  std::string name;
  std::function<Letter(const Element&, const Element&)> mul;
  std::function<Element(std::size_t)> at;
  std::optional<std::size_t> order;  // nullopt: infinitely many letters
  std::function<std::string(const Element&)> label;

  std::vector<Element> prefix(std::size_t n) const;
};

AlphabetOp group_op(GroupPtr g);
// Disjoint union of cyclic groups Z_{sizes[i]} with the max-index rule; letters (i, r).
// When `repeat` is set the size list cycles forever and the letter set is infinite.
AlphabetOp union_of_cyclic_groups(std::vector<std::size_t> sizes, bool repeat);

// Entrywise product, empty letter absorbing.
Sequence apply_op(const Group& g, const Sequence& x, const Sequence& y);
Sequence apply_op(const AlphabetOp& op, const Sequence& x, const Sequence& y);
Sequence star(const Group& g, const Sequence& x);
// e^n: identity letters at every index <= n.
Sequence idempotent(const ShiftPresentation& p, Index n);

struct ClosureReport {
  bool closed = true;
  bool exact = false;
  std::size_t pairs_checked = 0;
  std::size_t bound = 0;
  std::optional<std::pair<Word, Word>> witness;
  json to_json(const Group& g) const;
};
// Closure of the allowed windows under the entrywise product; a violation is ClosureViolation data.
ClosureReport verify_closure(const ShiftPresentation& p, std::size_t bound, Exec exec = Exec::Serial);

struct InverseIdempotent {
  Sequence inverse;
  Sequence idempotent;
};
InverseIdempotent inverse_and_idempotents(const ShiftPresentation& p, const Sequence& x);

enum class IdempotentSet { Top, TopAndZero, FullChain };
const char* idempotent_set_name(IdempotentSet s);

struct SemigroupClass {
  bool is_group = false;
  IdempotentSet idempotents = IdempotentSet::Top;
  json to_json() const;
};
SemigroupClass classify_semigroup(const ShiftPresentation& p);

struct ContinuityReport {
  bool continuous = false;
  std::string reason;
  json witness;
};
ContinuityReport continuity_check(const ShiftPresentation& p, std::size_t bound);
// Fiber test for an arbitrary alphabet operation on the one-sided full shift:
// every fiber {(b,c): b c = a} must stop growing between the first B and 2B letters.
ContinuityReport continuity_check(const AlphabetOp& op, std::size_t bound, std::size_t probes = 4);

// Recovers the alphabet operation a.b = (const(a) op const(b))_0 from a 1-block sequence operation.
AlphabetOp induce_alphabet_op(const std::function<Sequence(const Sequence&, const Sequence&)>& seq_op,
                              const AlphabetOp& letters, Axis axis);

struct AxiomReport {
  std::size_t triples = 0;
  std::size_t associativity = 0;  // violation counts
  std::size_t regularity = 0;
  std::size_t idempotents_commute = 0;
  std::size_t shift_homomorphism = 0;
  std::size_t green_classes = 0;
  std::size_t closure = 0;
  std::size_t prefix_agreement = 0;
  std::vector<json> witnesses;

  std::size_t violations() const;
  json to_json() const;
};
// Runs every check on (samples[3i], samples[3i+1], samples[3i+2]).
AxiomReport axiom_suite(const ShiftPresentation& p, const std::vector<Sequence>& samples, Exec exec,
                        bool check_membership = true);

}  // namespace shiftforge
