// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_STATS_HPP
#define ACS_STATS_HPP

#include <cstdint>
#include <span>

namespace acs {

// Per-trial RNG streams are derived from (master seed, trial index) so that
// aggregation is independent of execution order and parallelism.
inline uint64_t derive_stream_seed(uint64_t master, uint64_t index) {
  uint64_t x = master ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Welford accumulator.
class RunningStat {
 public:
  void add(double x) {
    n_++;
    const double d = x - mean_;
    mean_ += d / double(n_);
    m2_ += d * (x - mean_);
  }
  uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }
  double stddev() const;
  double std_error() const;

 private:
  uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double binomial_se(double p, uint64_t n);

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool contains(double x) const { return low <= x && x <= high; }
};

// Normal-approximation binomial CI around the empirical rate, clamped to
// [0, 1]. z = 3 corresponds to the default three-standard-error tolerance.
Interval binomial_ci(uint64_t successes, uint64_t trials, double z);

// |rate - p0| <= z * SE(p0, n), the default tolerance test for rates.
bool rate_within(double rate, double p0, uint64_t n, double z);

// Upper-tail p-value of a 1-dof chi-square statistic.
double chi_square_p_1dof(double chi2);

// Pearson chi-square of independence on a 2x2 table (1 dof).
double chi_square_2x2(uint64_t n00, uint64_t n01, uint64_t n10, uint64_t n11);

// Pearson goodness-of-fit statistic against the uniform distribution over
// `bins.size()` categories.
double chi_square_uniform(std::span<const uint64_t> bins, uint64_t total);

}  // namespace acs

#endif  // ACS_STATS_HPP
