#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ub0/pcgroup.hpp"

namespace ub0cli {

struct SuiteResult {
  std::string name;
  bool ok = true;
  std::string detail;  // first failure description; empty when ok
};

// Deterministic property suites over the built-in groups (plus an optional
// user-supplied presentation). Guard overrides apply to the enumerative
// steps and propagate as guard errors when set too low.
std::vector<SuiteResult> run_selftest(std::uint64_t seed, std::uint64_t max_order,
                                      std::uint64_t max_gens,
                                      const std::optional<ub0::PcPresentation>& extra);

}  // namespace ub0cli
