#include "cavreg/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cavreg/error.hpp"

namespace cavreg {

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) fail(ErrorKind::invalid_parameters, "wilson_interval needs trials > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double zero_success_upper_bound(std::size_t trials, double confidence) {
  if (trials == 0) fail(ErrorKind::invalid_parameters, "zero_success_upper_bound needs trials > 0");
  return 1.0 - std::pow(1.0 - confidence, 1.0 / static_cast<double>(trials));
}

}  // namespace cavreg
