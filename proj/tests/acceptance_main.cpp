// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>

#include "acs/suite.hpp"

int main(int argc, char** argv) {
  uint64_t seed = acs::kAcceptanceSeed;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 0);
  bool all_pass = true;
  acs::run_acceptance_suite(seed, [&](const acs::CriterionResult& r) {
    std::puts(acs::format_criterion_line(r).c_str());
    std::fflush(stdout);
    all_pass = all_pass && r.pass;
  });
  return all_pass ? 0 : 1;
}
