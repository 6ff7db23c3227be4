#pragma once

#include "isofp/test_function.hpp"

#include <stdexcept>

namespace isofp::testing {

inline TestFunction member(const TestCorpus& c, const std::string& id) {
  for (const auto& m : c.members)
    if (m.id() == id) return m;
  throw std::out_of_range("no corpus member " + id);
}

inline TestCorpus only(std::vector<TestFunction> fs, std::uint64_t seed = 0) {
  TestCorpus c;
  c.seed = seed;
  c.members = std::move(fs);
  return c;
}

}  // namespace isofp::testing
