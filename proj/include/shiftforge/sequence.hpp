#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "shiftforge/core.hpp"

namespace shiftforge {

class Group;

enum class Axis { OneSided, TwoSided };
const char* axis_name(Axis a);
Axis axis_from_string(const std::string& s);

using Index = std::int64_t;
constexpr Index kNegInf = std::numeric_limits<Index>::min();
constexpr Index kPosInf = std::numeric_limits<Index>::max();

// Eventually periodic sequence in normal form.
//   Finite      x_0..x_k then empty letters (one-sided).
//   LeftRay     left_period repeated, then transient ending at base (two-sided).
//   Infinite    transient then period forever (one-sided).
//   BiInfinite  left_period for i < base, center, then right_period.
class Sequence {
 public:
  enum class Kind { Empty, Finite, LeftRay, Infinite, BiInfinite };

  static Sequence empty(Axis axis);
  static Sequence finite(Word word);
  static Sequence left_ray(Word left_period, Word left_transient, Index end_index);
  static Sequence infinite(Word transient, Word period);
  static Sequence periodic(Word left_period, Word center, Word right_period, Index base_index);
  static Sequence constant(Axis axis, const Element& a);

  Axis axis() const noexcept { return axis_; }
  Kind kind() const noexcept { return kind_; }
  bool is_empty() const noexcept { return kind_ == Kind::Empty; }
  bool is_finite() const noexcept { return kind_ != Kind::Infinite && kind_ != Kind::BiInfinite; }
  Index length() const;

  const Word& left_period() const noexcept { return left_; }
  // Finite word, LeftRay transient, Infinite transient or BiInfinite center.
  const Word& middle() const noexcept { return mid_; }
  const Word& right_period() const noexcept { return right_; }
  // LeftRay end index or BiInfinite base index.
  Index base() const noexcept { return base_; }

  Letter at(Index i) const;

  friend bool operator==(const Sequence& a, const Sequence& b);
  friend bool operator!=(const Sequence& a, const Sequence& b) { return !(a == b); }
  friend bool operator<(const Sequence& a, const Sequence& b);

  std::string str() const;

 private:
  Sequence() = default;
  void normalize();
  Letter raw_at(Index i) const;

  Axis axis_ = Axis::OneSided;
  Kind kind_ = Kind::Empty;
  Word left_, mid_, right_;
  Index base_ = 0;
};

// Where a sequence (or a result under construction) is periodic.
struct Frame {
  Axis axis = Axis::OneSided;
  Index length = kNegInf;
  Index left_start = 0;  // entries with i < left_start repeat with left_period
  Index left_period = 1;
  Index right_start = 0;  // entries with i >= right_start repeat with right_period
  Index right_period = 1;
};

Frame frame_of(const Sequence& x);
Frame merge_frames(const Frame& a, const Frame& b);
Sequence tabulate(const Frame& f, const std::function<Letter(Index)>& entry);

Sequence shift(const Sequence& x);
Sequence shift_by(const Sequence& x, Index n);
Sequence map_letters(const Sequence& x, const std::function<Element(const Element&)>& fn);
Sequence zip_letters(const Sequence& x, const Sequence& y,
                     const std::function<Element(const Element&, const Element&)>& fn);
// Sliding rule with memory and anticipation; the rule sees window x_{i-memory..i+anticipation}
// and the result has the length of x (empty letters stay empty).
Sequence slide(const Sequence& x, int memory, int anticipation,
               const std::function<Letter(const std::vector<Letter>&)>& rule);
Sequence product_glue(const Sequence& x, const Sequence& y);
std::pair<Sequence, Sequence> product_split(const Sequence& x, std::size_t left_arity);
Sequence project_nonneg(const Sequence& x);
Sequence identity_word_sequence(Axis axis, const Element& id, Index length);

using LetterBlock = std::vector<Letter>;
std::set<LetterBlock> blocks_of(const Sequence& x, std::size_t n, bool include_empty_letter);
std::set<Word> words_of(const Sequence& x, std::size_t n);
// Representative index window: every length-n window of x equals one starting inside it.
std::pair<Index, Index> window_starts(const Sequence& x, std::size_t n);

struct Cylinder {
  enum class Kind { Basic, Complement };
  Kind kind = Kind::Basic;
  Sequence base = Sequence::empty(Axis::OneSided);
  std::vector<Element> excluded;
  std::vector<Sequence> bases;
};

bool cylinder_contains(const Cylinder& z, const Sequence& y);

json sequence_to_json(const Group& g, const Sequence& x);
Sequence sequence_from_json(const Group& g, Axis axis, const json& j);

}  // namespace shiftforge
