#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace shiftforge {

enum class Exec { Serial, Parallel };

// out[i] = fn(i). The parallel path writes into preassigned slots, so the
// result does not depend on scheduling.
template <class R, class F>
std::vector<R> run_indexed(std::size_t n, Exec exec, F&& fn) {
  std::vector<R> out(n);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace shiftforge
