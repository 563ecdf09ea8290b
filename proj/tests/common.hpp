#pragma once

#include <string>

#include "shiftforge/cli_io.hpp"

#ifndef SHIFTFORGE_FIXTURE_DIR
#define SHIFTFORGE_FIXTURE_DIR "fixtures"
#endif

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(SHIFTFORGE_FIXTURE_DIR) + "/" + name;
}

inline shiftforge::LoadedSpec fixture(const std::string& name) {
  return shiftforge::load_spec(fixture_path(name));
}

inline shiftforge::Element e1(long long v) { return shiftforge::Element{shiftforge::Integer(v)}; }
inline shiftforge::Element e2(long long a, long long b) {
  return shiftforge::Element{shiftforge::Integer(a), shiftforge::Integer(b)};
}

}  // namespace testutil
