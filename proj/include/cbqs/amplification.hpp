#pragma once

#include "cbqs/rng.hpp"

#include <cmath>
#include <cstdint>

namespace cbqs {

/// Probability that measuring after j Grover iterates yields a marked state:
/// sin^2((2j+1) * asin(sqrt(a))) for good-state mass a.
inline double success_probability(double a, std::int64_t j) {
  if (a <= 0.0) return 0.0;
  if (a >= 1.0) return 1.0;
  const double theta = std::asin(std::sqrt(a));
  const double s = std::sin(static_cast<double>(2 * j + 1) * theta);
  return s * s;
}

inline bool round_succeeds(double a, std::int64_t j, Rng& rng) {
  return rng.bernoulli(success_probability(a, j));
}

/// Exponential schedule m = ceil(d^l), l = 1, 2, ... with 1 < d < 2.
class ExponentialSchedule {
 public:
  explicit ExponentialSchedule(double d) : d_(d) {}

  /// Advances l and returns the new round's iterate cap m.
  std::int64_t next_m() {
    ++l_;
    const double m = std::ceil(std::pow(d_, static_cast<double>(l_)));
    if (m >= 9.0e18) return INT64_MAX / 4;  // schedule saturates, never overflows
    return static_cast<std::int64_t>(m);
  }

  std::int64_t level() const { return l_; }

 private:
  double d_;
  std::int64_t l_ = 0;
};

}  // namespace cbqs
