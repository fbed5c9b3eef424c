// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acs/stats.hpp"

#include <algorithm>
#include <cmath>

namespace acs {

double RunningStat::stddev() const { return std::sqrt(variance()); }

double RunningStat::std_error() const {
  return n_ > 0 ? stddev() / std::sqrt(double(n_)) : 0.0;
}

double binomial_se(double p, uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / double(n));
}

Interval binomial_ci(uint64_t successes, uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double p = double(successes) / double(trials);
  const double half = z * binomial_se(p, trials);
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

bool rate_within(double rate, double p0, uint64_t n, double z) {
  return std::abs(rate - p0) <= z * binomial_se(p0, n);
}

double chi_square_p_1dof(double chi2) {
  if (chi2 <= 0.0) return 1.0;
  return std::erfc(std::sqrt(chi2 / 2.0));
}

double chi_square_2x2(uint64_t n00, uint64_t n01, uint64_t n10, uint64_t n11) {
  const double a = double(n00), b = double(n01), c = double(n10),
               d = double(n11);
  const double n = a + b + c + d;
  const double r0 = a + b, r1 = c + d, c0 = a + c, c1 = b + d;
  if (r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0) return 0.0;
  const double num = a * d - b * c;
  return n * num * num / (r0 * r1 * c0 * c1);
}

double chi_square_uniform(std::span<const uint64_t> bins, uint64_t total) {
  if (bins.empty() || total == 0) return 0.0;
  const double expected = double(total) / double(bins.size());
  double chi2 = 0.0;
  for (uint64_t count : bins) {
    const double d = double(count) - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

}  // namespace acs
