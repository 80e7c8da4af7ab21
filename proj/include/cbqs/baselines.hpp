#pragma once

#include "cbqs/problem.hpp"
#include "cbqs/rng.hpp"

#include <utility>
#include <vector>

namespace cbqs {

struct BruteForceResult {
  bool feasible = false;
  Assignment x;
  BigInt objective;
};

/// Exhaustive maximization over all 2^n assignments; ties break toward the
/// lexicographically smallest assignment. Refuses n above the cap.
/// brute_force splits the range across OpenMP workers; brute_force_serial is
/// the reference implementation kept for cross-checking, and both return the
/// identical result.
BruteForceResult brute_force(const ProblemInstance& inst, std::int32_t max_n = 24);
BruteForceResult brute_force_serial(const ProblemInstance& inst, std::int32_t max_n = 24);

/// Number of feasible assignments whose objective reaches `target`.
std::uint64_t count_feasible_optimal(const ProblemInstance& inst,
                                     const BigInt& target, std::int32_t max_n = 24);

struct SAConfig {
  std::int64_t steps = 100000;
  double t_max = 1000.0;  // above the typical energy step at coefficient scale ~100
  double t_min = 0.01;
  double penalty_weight = 10.0;
};

struct SAResult {
  Assignment best;
  BigInt objective;
  bool feasible = false;
  double wall_seconds = 0.0;
  /// Improving feasible incumbents as (step, objective).
  std::vector<std::pair<std::int64_t, BigInt>> timeline;
};

/// Single-bit-flip annealing on energy = -objective + penalty * |violation|
/// with a geometric temperature schedule. Returns the best feasible
/// assignment visited, or the best-energy assignment flagged infeasible.
SAResult simulated_annealing(const ProblemInstance& inst, const SAConfig& cfg,
                             Rng& rng);

}  // namespace cbqs
