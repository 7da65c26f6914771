#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sconv/testing.hpp"

namespace sconv {

struct SuiteResult {
  std::string module;
  std::vector<InvariantCheck> checks;

  int passed() const;
  int failed() const;
};

// Property checks of every module on seeded random instances. A check that
// throws is recorded as failed with the exception text.
std::vector<SuiteResult> run_invariant_suite(std::uint64_t seed);

}  // namespace sconv
