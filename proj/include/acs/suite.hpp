// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_SUITE_HPP
#define ACS_SUITE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace acs {

struct CriterionResult {
  int id = 0;
  std::string label;
  bool pass = false;
  std::string detail;
};

inline constexpr uint64_t kAcceptanceSeed = 20260810;

// Runs the full acceptance matrix: security-math reproduction (collision
// bounds, violation rates, masking and re-seeding effects), irregular
// unwinding, the signing gadget, analytic formula cross-checks and the
// property suite. Deterministic for a fixed seed. `on_result` is invoked
// as each criterion completes.
std::vector<CriterionResult> run_acceptance_suite(
    uint64_t master_seed = kAcceptanceSeed,
    const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_criterion_line(const CriterionResult& r);

}  // namespace acs

#endif  // ACS_SUITE_HPP
