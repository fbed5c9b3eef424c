// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_ANALYTICS_HPP
#define ACS_ANALYTICS_HPP

#include <cstdint>

namespace acs {

// Probability that some pair among q harvested b-bit tokens collides:
// 1 - prod_{i=0}^{q-1} (1 - i/2^b), evaluated in log space so b = 16 and
// beyond stay finite. Throws std::domain_error for q outside [0, 2^b].
double p_collision(int64_t q, unsigned b);

// Mean number of harvested tokens until the first collision,
// sqrt(pi * 2^b / 2).
double expected_tokens_to_collision(unsigned b);

// Guesses needed to defeat a b-bit token with success probability p when a
// failed guess terminates the run: log(1-p) / log(1-2^-b). Throws
// std::domain_error unless 0 < p < 1.
double guesses_for_success(double p, unsigned b);

enum class ViolationType {
  kOnGraph,
  kOffGraphCallSite,
  kOffGraphArbitrary,
};

// Maximum success probability of a call-stack integrity violation for the
// given violation type, with or without token masking.
double table1_reference(ViolationType type, bool masked, unsigned b);

}  // namespace acs

#endif  // ACS_ANALYTICS_HPP
