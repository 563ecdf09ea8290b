#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftforge/parallel.hpp"
#include "shiftforge/shift_space.hpp"

namespace shiftforge {

// Markov presentation of a two-sided full or Markov shift; predicate shifts go
// through their higher-block presentation. Throws Unsupported otherwise.
struct Markovized {
  ShiftPtr shift;
  SlidingCode forward, inverse;  // identity unless a higher-block recode happened
  std::size_t block = 1;
};
Markovized markovize(const ShiftPtr& p);

// N ∩ ker f.
SubgroupPtr compute_H(const ShiftPresentation& p);

// Markov shift on the follower classes G/N with subgroup f(N) and rule cN -> f(c) f(N).
ShiftPtr follower_set_shift(const ShiftPresentation& p);

struct ThetaCode {
  SlidingCode forward;  // x_i -> F_1(x_i)
  SlidingCode inverse;  // memory 1
  ShiftPtr image;
};
// Throws HNotTrivial unless N ∩ ker f is trivial.
ThetaCode theta_code(const ShiftPtr& p);

struct HatShift {
  ShiftPtr hat;           // over G/H
  SubgroupPtr h;          // H as a subgroup of G
  QuotientPtr quotient;   // G/H
  GroupPtr h_alphabet;    // H as a group
};
HatShift hat_shift(const ShiftPtr& p);

struct PhiCode {
  SlidingCode forward;  // a -> (aH, S(aH)^-1 a)
  SlidingCode inverse;  // (c, h) -> S(c) h
  HatShift hat;
  GroupPtr star_alphabet;  // G/H x H with the transported product
  ShiftPtr image;          // hat ⊠ full(H) carried by star_alphabet
  json section;            // the chosen representatives
};
PhiCode phi_code(const ShiftPtr& p);

struct FractalReport {
  enum class Kind { Fractal, SelfSimilar, NonFractal };
  Kind kind = Kind::Fractal;
  std::size_t level = 0;                 // SelfSimilar level or NonFractal stage
  std::optional<std::size_t> h_order;    // NonFractal: |H^[n]|, nullopt if infinite
  std::size_t depth = 0;
  std::size_t signature_bound = 0;
  std::vector<json> stages;
  json to_json() const;
};
const char* fractal_kind_name(FractalReport::Kind k);
// Throws DepthExhausted when every H^[n] up to `depth` is trivial without a repeat.
FractalReport is_fractal(const ShiftPtr& p, std::size_t depth = 8, std::size_t signature_bound = 16);

// Index-aligned comparison of the first `bound` letters: order, products and transitions.
bool same_stage_data(const ShiftPresentation& a, const ShiftPresentation& b, std::size_t bound);

struct StageRecord {
  enum class Kind { Phi, Theta };
  Kind kind;
  ShiftPtr before, after;
  SlidingCode forward, inverse;  // on head letters only
  GroupPtr op_alphabet;          // product used on the image side
  ShiftPtr image;
  std::optional<std::size_t> g_order, quotient_order, h_order;
};

struct StageCheck {
  std::size_t samples = 0, pairs = 0;
  std::size_t roundtrip = 0, image = 0, length = 0, shift = 0, op = 0;  // violation counts
  std::vector<json> witnesses;
  std::size_t violations() const { return roundtrip + image + length + shift + op; }
  json to_json() const;
};
// theta / phi identities on sequences of the stage input.
StageCheck check_stage(const StageRecord& s, const std::vector<Sequence>& xs, std::size_t pairs, Exec exec);

struct CompositeCheck {
  std::size_t sequences = 0, targets = 0, pairs = 0;
  std::size_t roundtrip = 0, image = 0, shift = 0, surjective = 0, op = 0, head_op = 0;
  bool exhaustive = false;
  std::size_t transient = 0, period = 0;
  std::vector<json> witnesses;
  std::size_t violations() const { return roundtrip + image + shift + surjective + op + head_op; }
  json to_json() const;
};

struct DecompositionResult {
  ShiftPtr input;       // Markov presentation actually decomposed
  ShiftPtr fractal;     // head factor
  FractalReport fractal_report;
  std::vector<SubgroupPtr> h_list;  // H_1 first
  std::vector<GroupPtr> h_alphabets;
  ShiftPtr target;                  // fractal ⊠ full(H_m x ... x H_1)
  SlidingCode forward, inverse;     // on whole letters [head | H_m | ... | H_1]
  std::size_t phi_steps = 0, theta_steps = 0;
  std::vector<StageRecord> stages;
  std::vector<json> sections;
  std::vector<std::string> trace;
  std::vector<json> lagrange;
  Markovized markov;
  // ⋆ on the target: F(F^-1 x • F^-1 y).
  Sequence star(const Sequence& x, const Sequence& y) const;
  json to_json(bool include_checks = true) const;
  std::vector<StageCheck> stage_checks;
  CompositeCheck composite;
};

struct DecomposeOptions {
  std::size_t depth = 8;
  std::uint64_t seed = 42;
  std::size_t samples = 128;
  std::size_t pairs = 512;
  std::size_t transient = 4, period = 4;  // exhaustive caps for finite alphabets
  std::size_t pair_transient = 2, pair_period = 2;
  Exec exec = Exec::Parallel;
  bool verify = true;
};
DecompositionResult decompose(const ShiftPtr& p, const DecomposeOptions& opt = {});
CompositeCheck verify_composite(const DecompositionResult& r, const DecomposeOptions& opt);

}  // namespace shiftforge
