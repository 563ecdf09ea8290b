#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "shiftforge/shift_space.hpp"

namespace shiftforge {

struct SampleCaps {
  std::size_t transient = 4;
  std::size_t period = 6;
  std::size_t letters = 8;  // draw letters from the first `letters` of the enumeration
};

// Eventually periodic members of the shift, including finite ones and the
// empty sequence when they belong. Same seed, same output.
std::vector<Sequence> sample_sequences(const ShiftPresentation& p, std::size_t count, std::uint64_t seed,
                                       SampleCaps caps = {});

// Finite two-sided walks: a periodic left tail followed by a random path in
// the transition graph. These are language patterns, not necessarily members.
// Followers are drawn from the exact follower set when it is finite.
std::vector<Sequence> walk_patterns(const ShiftPresentation& p, std::size_t count, std::uint64_t seed,
                                    std::size_t max_steps = 6, SampleCaps caps = {});

// A cycle of the transition graph among the first `caps.letters` letters,
// found by random walk; falls back to the identity letter.
Word sample_cycle(const ShiftPresentation& p, std::mt19937_64& rng, SampleCaps caps);

// Every member with transient <= `transient` and periods <= `period`, up to
// shifting, in sorted order. Two-sided members are anchored at index 0.
// Needs a finite alphabet.
std::vector<Sequence> enumerate_members(const ShiftPresentation& p, std::size_t transient, std::size_t period);

}  // namespace shiftforge
