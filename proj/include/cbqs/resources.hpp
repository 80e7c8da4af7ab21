#pragma once

#include "cbqs/problem.hpp"
#include "cbqs/rng.hpp"

#include <cstdint>

namespace cbqs {

/// Hardware cost model: register width kappa, the per-iteration cycle count
/// composed from the published adder depths, and the gate time.
struct ResourceModel {
  std::int32_t n = 0;
  std::int32_t kappa = 4;
  double gate_time_ns = 6.5;
  std::int64_t cycles_per_grover_iteration = 0;

  static ResourceModel make(std::int32_t n, std::int32_t kappa,
                            double gate_time_ns = 6.5);
  /// Derives kappa from the instance capacities (two's-complement headroom:
  /// 2^(kappa-1) > max_k(c_k + P_k)), clamped to >= 4 for the
  /// carry-lookahead depth formula.
  static ResourceModel for_instance(const ProblemInstance& inst,
                                    double gate_time_ns = 6.5);
};

/// QFT-adder chain: t additions cost t * (2 ceil(log2 kappa) + 3) cycles.
std::int64_t ca_cycles(std::int64_t t, std::int32_t kappa);

/// Carry-lookahead adder depth; requires kappa >= 4.
std::int64_t ca2_cycles(std::int32_t kappa);

/// Full constraint check: 2n(C_A2 + 4 kappa + 1) + 2n C_A(n).
std::int64_t constraint_check_cycles(std::int32_t n, std::int32_t kappa);

/// Quadratic objective evaluation: C_A(n(n+1)/2).
std::int64_t objective_cycles(std::int32_t n, std::int32_t kappa);

/// Smallest register width satisfying the headroom invariant (>= 2).
std::int32_t derive_kappa(const ProblemInstance& inst);

double runtime_seconds(std::int64_t oracle_calls, const ResourceModel& model);

/// Query count sqrt(nT) * n * log2^2(n log2 T) for quantum Branch-and-Bound
/// with T explored tree nodes; constant factor 1, no accuracy factor.
double qbnb_oracle_calls(std::int32_t n, double tree_nodes);

/// Oracle-call budget (n/4)^2 + 1200, rounded half-up for odd n.
std::int64_t budget_m(std::int32_t n);

/// Mean oracle calls of the exponential schedule under an unbiased uniform
/// preparation with good_count marked states out of 2^n; Monte Carlo over
/// `trials` runs with seeds derived from rng.
double grover_baseline_calls(std::int32_t n, std::uint64_t good_count,
                             std::int32_t trials, Rng& rng, double d = 1.2);

}  // namespace cbqs
