#pragma once

#include "cbqs/problem.hpp"
#include "cbqs/sampler.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace cbqs {

enum class AmplitudeMode { Exact, Empirical };

struct SearchConfig {
  double d = 1.2;                  // schedule base, 1 < d < 2
  std::int64_t M = 1200;           // total oracle-call budget for a run
  AmplitudeMode amplitude_mode = AmplitudeMode::Exact;
  std::int32_t n_est = 10000;      // sample count for empirical amplitude
  std::uint64_t seed = 0;          // used where no generator is passed in
  bool retarget_bias = true;       // re-aim the bias at each new incumbent
  bool count_state_prep = false;   // add +1 per round for the initial G
  std::int32_t exact_cap = Sampler::kExactCap;
  SamplerOptions sampler;
};

using SamplePredicate = std::function<bool(const Sample&)>;

/// Good-state mass of the prepared distribution. Exact mode sums the leaf
/// probabilities of the decision tree (refused above the n cap); empirical
/// mode counts over n_est independent samples, returning the resolution
/// floor 1/(4 n_est) instead of zero when no sample satisfies.
double amplitude(const ProblemInstance& inst, const BiasProfile& bias,
                 const SamplePredicate& pred, const SearchConfig& cfg);

struct RoundLog {
  std::int64_t m = 0;
  std::int64_t j = 0;
  bool success = false;
};

struct QSearchResult {
  Sample sample;
  std::int64_t m_tot = 0;
  bool success = false;
  std::vector<RoundLog> rounds;
};

/// One exponential-schedule search for a sample in the marked set. Each
/// round draws j uniform in [1, m], adds 2j+1 oracle calls, and measures a
/// marked sample with probability sin^2((2j+1) asin sqrt(a)). Returns when
/// the measured sample is marked AND feasible, or the budget is spent.
QSearchResult qsearch(const ProblemInstance& inst, const BiasProfile& bias,
                      const SamplePredicate& marked, const SearchConfig& cfg,
                      Rng& rng);

struct QSearchViolationResult {
  Sample sample;
  BigInt v;  // measured total constraint violation (<= 0)
  std::int64_t m_tot = 0;
  bool success = false;
};

/// Violation-stage variant: marked set {violation > T}; the stopping test is
/// the marked predicate alone.
QSearchViolationResult qsearch_violation(const ProblemInstance& inst,
                                         const BiasProfile& bias, const BigInt& T,
                                         const SearchConfig& cfg, Rng& rng);

struct Incumbent {
  std::int64_t m_tot = 0;
  BigInt value;   // objective (stage 2) or violation (stage 1)
  Assignment x;
  int stage = 2;
};

struct SearchTrace {
  std::int64_t m_tot = 0;
  std::vector<Incumbent> incumbents;
  std::vector<std::int64_t> stage_marks;  // m_tot at each stage switch
  Assignment best;
  BigInt best_value;        // objective if found_feasible, else best violation
  bool found_feasible = false;
};

/// Threshold-climbing maximum search: repeat qsearch with the predicate
/// {objective > T}, raising T and re-aiming the bias at each improvement,
/// until a search fails to improve or the budget is gone.
SearchTrace qmaxsearch(const ProblemInstance& inst, const SearchConfig& cfg,
                       Rng& rng);

/// Two-stage variant: if the all-zeros start is infeasible, first climb the
/// total violation to 0, then run the objective stage. The budget is shared
/// across stages.
SearchTrace qmaxsearch_two_stage(const ProblemInstance& inst,
                                 const SearchConfig& cfg, Rng& rng);

}  // namespace cbqs
