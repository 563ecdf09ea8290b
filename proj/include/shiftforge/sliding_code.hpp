#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shiftforge/sequence.hpp"

namespace shiftforge {

struct SlidingCode {
  std::string name;
  int memory = 0;
  int anticipation = 0;
  // Sees x_{i-memory..i+anticipation}; returns the empty letter iff x_i is empty.
  std::function<Letter(const std::vector<Letter>&)> rule;

  Sequence operator()(const Sequence& x) const { return slide(x, memory, anticipation, rule); }
};

SlidingCode identity_code();
SlidingCode one_block_code(std::string name, std::function<Element(const Element&)> fn);
// Apply `first`, then `second`, as one local rule.
SlidingCode compose(const SlidingCode& first, const SlidingCode& second);

}  // namespace shiftforge
