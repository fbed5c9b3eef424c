// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acs/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace acs {

double p_collision(int64_t q, unsigned b) {
  if (b < 1 || b > 62) throw std::domain_error("token width out of range");
  const double n = std::ldexp(1.0, int(b));  // 2^b
  if (q < 0 || double(q) > n) throw std::domain_error("q out of [0, 2^b]");
  // Product form of the birthday bound. The direct product keeps small
  // cases exact; once it nears underflow the log-space accumulation takes
  // over. The factorial form would overflow immediately at b = 16.
  double product = 1.0;
  double log_product = 0.0;
  for (int64_t i = 0; i < q; ++i) {
    const double factor_minus_1 = -double(i) / n;
    product *= 1.0 + factor_minus_1;
    log_product += std::log1p(factor_minus_1);
  }
  if (product > 1e-290) {
    return 1.0 - product;
  }
  return -std::expm1(log_product);
}

double expected_tokens_to_collision(unsigned b) {
  if (b < 1 || b > 62) throw std::domain_error("token width out of range");
  return std::sqrt(M_PI * std::ldexp(1.0, int(b)) / 2.0);
}

double guesses_for_success(double p, unsigned b) {
  if (b < 1 || b > 62) throw std::domain_error("token width out of range");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must be in (0, 1)");
  return std::log1p(-p) / std::log1p(-std::ldexp(1.0, -int(b)));
}

double table1_reference(ViolationType type, bool masked, unsigned b) {
  const double pb = std::ldexp(1.0, -int(b));  // 2^-b
  switch (type) {
    case ViolationType::kOnGraph:
      return masked ? pb : 1.0;
    case ViolationType::kOffGraphCallSite:
      return pb;
    case ViolationType::kOffGraphArbitrary:
      return pb * pb;
  }
  throw std::domain_error("unknown violation type");
}

}  // namespace acs
