#pragma once

#include "cbqs/problem.hpp"
#include "cbqs/rng.hpp"

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace cbqs {

/// Per-bit Bernoulli probabilities standing in for the R_y rotations of the
/// preparation circuit: drawing 1 has probability (n+4)/(n+8) where the
/// target assignment has a 1, and 4/(n+8) where it has a 0.
struct BiasProfile {
  std::int32_t n = 0;
  Assignment target;
  std::vector<double> p_one;

  static BiasProfile toward(std::int32_t n, const Assignment& target);
  static BiasProfile toward_zero(std::int32_t n);
  /// Explicit probabilities (tests and ablations).
  static BiasProfile with_probabilities(std::vector<double> p_one);
};

enum class LbMode {
  Simple,  // six-case rule keyed on the sign of g
  Tight,   // parity rule keyed on the sign of alpha*g; true subset minimum
};

struct SamplerOptions {
  LbMode lb_mode = LbMode::Simple;
  /// true: a base stops being "remaining" as soon as one of its variables is
  /// assigned 0. false: cheaper structural variant that only looks at
  /// whether all variables of the base are assigned.
  bool exact_product_check = true;
};

/// Classical shadow of the preparation circuit's registers for a partial
/// assignment: exact remaining capacities, fixed product values g_{i,k}, and
/// the dead flag raised when neither successor passed the checks.
struct SampleState {
  Assignment bits;           // length n; positions >= t are still 0
  std::int32_t t = 0;        // number of assigned variables
  std::vector<Wide> caps;    // c~_k, polynomial side
  std::vector<BigInt> g;     // fixed product values, one per (constraint, term)
  std::vector<std::uint8_t> base_alive;  // per base: no member assigned 0 yet
  bool dead = false;
  double logprob = 0.0;
};

/// A measured outcome: complete assignment plus the register contents.
struct Sample {
  Assignment x;
  std::vector<BigInt> caps;
  BigInt objective;
  BigInt violation;
  double logprob = 0.0;
  bool dead = false;
};

/// Q+_{k,t1}: weight the constraint consumes if x_{t1} is set to 1 —
/// positive coefficients whose largest index is t1, times the closed prefix.
Wide q_plus(const ProblemInstance& inst, std::size_t k, std::int32_t t1,
            const Assignment& bits);

/// Q-_{k,t1}: weight consumed if x_{t1} is set to 0 — negative coefficients
/// containing t1, times the prefix product over members below t1.
Wide q_minus(const ProblemInstance& inst, std::size_t k, std::int32_t t1,
             const Assignment& bits);

/// Lower-bound factor over the remaining bases of one product term, given
/// the fixed value g != 0. The bound on the term is alpha * g * LB.
/// `assigned` is the prefix length of bits that is meaningful.
BigInt product_lb(const ProductTerm& term, const Assignment& bits,
                  std::int32_t assigned, const BigInt& g, LbMode mode,
                  bool exact_remaining = true);

/// State-preparation emulator for one instance. Compiled index structures
/// are immutable after construction; all methods are const and safe to use
/// from parallel workers with per-worker generators.
class Sampler {
 public:
  static constexpr std::int32_t kExactCap = 24;

  explicit Sampler(const ProblemInstance& inst, SamplerOptions opts = {});

  const ProblemInstance& instance() const { return *inst_; }
  const SamplerOptions& options() const { return opts_; }

  SampleState initial_state() const;

  /// (b+, b-) for assigning x_{t+1}, conjoining the capacity checks with the
  /// product-side lower-bound checks for each hypothetical bit value.
  std::pair<bool, bool> branch_flags(const SampleState& s) const;

  /// One oracle application: evaluates the flags and performs one of the
  /// four actions. Assigning a bit subtracts Q+/Q- from every capacity and
  /// updates the fixed products; a dead step leaves the registers untouched.
  void step(SampleState& s, const BiasProfile& bias, Rng& rng) const;

  /// Closes product bases affected by assigning x_{t1} = bit, folding fully
  /// one-assigned bases into the g values.
  void update_fixed_products(SampleState& s, std::int32_t t1, int bit) const;

  /// Completes a fully-assigned state into a measured Sample.
  Sample finish(const SampleState& s) const;

  Sample sample(const BiasProfile& bias, Rng& rng) const;

  enum class Action { Random, ForcedOne, ForcedZero, Dead, Leaf };

  struct Node {
    const SampleState& state;
    std::int32_t next_index = 0;  // t1 about to be assigned; 0 at leaves
    bool b_plus = false;
    bool b_minus = false;
    Action action = Action::Leaf;
    double path_prob = 1.0;
  };

  /// Full expansion of the decision tree (exact distribution). The visitor
  /// sees every internal node with its flags and every leaf.
  void walk_tree(const BiasProfile& bias,
                 const std::function<void(const Node&)>& visit,
                 std::int32_t max_n = kExactCap) const;

  struct WeightedSample {
    Sample sample;
    double prob = 0.0;
  };

  /// All leaves with their path probabilities; probabilities sum to 1.
  std::vector<WeightedSample> enumerate(const BiasProfile& bias,
                                        std::int32_t max_n = kExactCap) const;

 private:
  struct PosEntry {
    std::int64_t w_abs;
    std::vector<std::int32_t> others;  // S minus its max index
  };
  struct NegEntry {
    std::int64_t w_abs;
    std::vector<std::int32_t> prefix;  // members of S below the anchor index
  };
  struct CompiledConstraint {
    std::vector<std::vector<PosEntry>> pos_by_max;     // [t1] -> entries
    std::vector<std::vector<NegEntry>> neg_by_member;  // [t1] -> entries
    std::size_t term_begin = 0, term_end = 0;          // into flat product arrays
  };

  Wide q_plus_at(std::size_t k, std::int32_t t1, const Assignment& bits) const;
  Wide q_minus_at(std::size_t k, std::int32_t t1, const Assignment& bits) const;
  bool product_side_ok(const SampleState& s, std::int32_t t1, int bit) const;
  struct Flags {
    bool b_plus, b_minus;
    std::vector<Wide> qp, qm;
  };
  Flags eval_branch(const SampleState& s) const;
  void apply_bit(SampleState& s, int bit, const Flags& f) const;
  void walk_rec(SampleState& s, double prob, const BiasProfile& bias,
                const std::function<void(const Node&)>& visit) const;

  const ProblemInstance* inst_;
  SamplerOptions opts_;
  std::vector<CompiledConstraint> constraints_;
  // flat product-term layout shared by all SampleStates
  struct FlatTerm {
    std::int32_t alpha;
    std::size_t base_begin, base_end;
    std::size_t constraint;
    const ProductTerm* src;  // owned by the instance; valid for our lifetime
  };
  struct FlatBase {
    std::vector<std::int32_t> vars;
    std::int32_t max_var;
    std::int64_t w;
    std::size_t term;
  };
  std::vector<FlatTerm> terms_;
  std::vector<FlatBase> bases_;
  std::vector<std::vector<std::size_t>> bases_by_var_;  // [t1] -> base ids
  bool has_products_ = false;
};

/// Exhaustive expansion of the sampler's decision tree into the exact
/// outcome distribution. Refuses n above the cap.
std::map<Assignment, double> exact_support(const ProblemInstance& inst,
                                           const BiasProfile& bias,
                                           SamplerOptions opts = {},
                                           std::int32_t max_n = Sampler::kExactCap);

/// Number of samples out of n_total satisfying pred; samples use seeds
/// derived from (seed, index) so the result is independent of scheduling.
/// The parallel kernel and the serial reference return identical counts.
std::int64_t batch_count(const Sampler& sampler, const BiasProfile& bias,
                         const std::function<bool(const Sample&)>& pred,
                         std::int32_t n_total, std::uint64_t seed);
std::int64_t batch_count_serial(const Sampler& sampler, const BiasProfile& bias,
                                const std::function<bool(const Sample&)>& pred,
                                std::int32_t n_total, std::uint64_t seed);

}  // namespace cbqs
