#pragma once

#include <cstddef>

namespace cavreg {

struct Interval {
  double low;
  double high;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

// One-sided upper bound on p after observing zero successes in `trials`
// at the given confidence (the "rule of three" for 95%).
double zero_success_upper_bound(std::size_t trials, double confidence = 0.95);

}  // namespace cavreg
