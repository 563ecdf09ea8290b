#include "shiftforge/sliding_code.hpp"

namespace shiftforge {

SlidingCode identity_code() {
  return SlidingCode{"identity", 0, 0, [](const std::vector<Letter>& w) { return w[0]; }};
}

SlidingCode one_block_code(std::string name, std::function<Element(const Element&)> fn) {
  return SlidingCode{std::move(name), 0, 0, [fn = std::move(fn)](const std::vector<Letter>& w) -> Letter {
                       if (!w[0]) return std::nullopt;
                       return fn(*w[0]);
                     }};
}

SlidingCode compose(const SlidingCode& first, const SlidingCode& second) {
  SlidingCode c;
  c.name = second.name + "∘" + first.name;
  c.memory = first.memory + second.memory;
  c.anticipation = first.anticipation + second.anticipation;
  const int m1 = first.memory, a1 = first.anticipation;
  const int m2 = second.memory, a2 = second.anticipation;
  auto r1 = first.rule;
  auto r2 = second.rule;
  c.rule = [=](const std::vector<Letter>& w) -> Letter {
    // w[0] is position -(m1+m2); the intermediate letter at offset d uses w[d+m2 .. d+m2+m1+a1].
    std::vector<Letter> mid(static_cast<std::size_t>(m2 + a2 + 1));
    std::vector<Letter> sub(static_cast<std::size_t>(m1 + a1 + 1));
    for (int d = 0; d <= m2 + a2; ++d) {
      for (int t = 0; t <= m1 + a1; ++t) sub[static_cast<std::size_t>(t)] = w[static_cast<std::size_t>(d + t)];
      mid[static_cast<std::size_t>(d)] = r1(sub);
    }
    return r2(mid);
  };
  return c;
}

}  // namespace shiftforge
