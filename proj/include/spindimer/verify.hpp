#pragma once

#include <optional>
#include <string>
#include <vector>

// Self-check suite behind the `verify` CLI command: canonical-decomposition
// reconstructions, the Lambert-W peak constants, the Curie-crossing identity,
// and the two oracle-equivalence sweeps.

namespace spindimer {

struct VerifyOptions {
  bool fine_grid = false;
  // Test hook: damages the weight of the given at_te term so the
  // decomposition check must fail and name it.
  std::optional<int> perturb_term;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace spindimer
