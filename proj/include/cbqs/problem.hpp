#pragma once

#include "cbqs/ints.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cbqs {

/// A full or partial 0/1 assignment; index j (1-based in the formulas) lives
/// at bits[j-1].
using Assignment = std::vector<std::uint8_t>;

/// One monomial p_S * prod_{j in S} x_j. vars is the sorted index set S
/// (1-based); an empty set denotes a constant.
struct Term {
  std::vector<std::int32_t> vars;
  std::int64_t coeff = 0;

  bool operator==(const Term&) const = default;
};

/// Multi-linear polynomial over n binary variables. Terms are kept sorted by
/// index set with unique sets and nonzero coefficients.
struct Polynomial {
  std::int32_t n = 0;
  std::vector<Term> terms;

  bool operator==(const Polynomial&) const = default;
};

/// One factor pow(w', prod_{j in S} x_j) of a product term.
struct ProductFactor {
  std::vector<std::int32_t> vars;  // sorted, non-empty
  std::int64_t base = 0;           // nonzero

  bool operator==(const ProductFactor&) const = default;
};

/// alpha * prod_S pow(w'_S, prod_{j in S} x_j). Terms with alpha = 0
/// contribute nothing and are dropped at construction.
struct ProductTerm {
  std::int32_t alpha = 0;  // -1 or +1 after construction
  std::vector<ProductFactor> bases;

  bool operator==(const ProductTerm&) const = default;
};

enum class Sense { LE, GE };

/// Constraint in normalized form: poly(x) + products(x) <= cap. GE inputs
/// are negated into LE at construction and constants are folded into cap,
/// so poly holds no constant term and sense is implicit.
struct Constraint {
  Polynomial poly;
  std::vector<ProductTerm> products;
  std::int64_t cap = 0;

  bool operator==(const Constraint&) const = default;
};

struct ProblemInstance {
  std::int32_t n = 0;
  Polynomial objective;
  std::vector<ProductTerm> objective_products;
  std::vector<Constraint> constraints;
  /// Cached shifts P_k = sum of |w| over negative polynomial coefficients.
  std::vector<std::int64_t> shifts;

  std::string id;
  /// Opaque metadata (generator parameters, witness, ...) preserved by the
  /// JSON round-trip; not interpreted by the solvers.
  std::string meta_json;

  bool operator==(const ProblemInstance& o) const {
    return n == o.n && objective == o.objective &&
           objective_products == o.objective_products &&
           constraints == o.constraints && shifts == o.shifts && id == o.id &&
           meta_json == o.meta_json;
  }
};

/// Sorts and validates a polynomial in place: indices in [1, n], sets
/// internally sorted and duplicate-free, distinct sets, nonzero coefficients.
/// Throws std::invalid_argument on any violation.
void canonicalize(Polynomial& poly);

/// Validates product terms against variable count n and drops alpha = 0
/// entries. Bases must be nonzero with non-empty, duplicate-free index sets.
void canonicalize(std::vector<ProductTerm>& products, std::int32_t n);

/// Builds a normalized constraint: GE is negated into LE, the constant term
/// is folded into the cap. Validates all parts.
Constraint make_constraint(Polynomial poly, std::vector<ProductTerm> products,
                           std::int64_t cap, Sense sense);

/// Assembles an instance, validating constraints and caching shifts.
ProblemInstance make_instance(std::int32_t n, Polynomial objective,
                              std::vector<ProductTerm> objective_products,
                              std::vector<Constraint> constraints);

/// P_k: sum of |w| over the negative polynomial coefficients of a normalized
/// constraint.
std::int64_t shift_of(const Constraint& c);

/// Exact evaluation of sum_S p_S prod_{j in S} x_j in the 128-bit working
/// width; throws OverflowError instead of wrapping.
Wide eval_polynomial(const Polynomial& poly, const Assignment& x);

/// sum_i alpha_i prod_S pow(w'_S, prod_{j in S} x_j), arbitrary precision.
BigInt eval_product_terms(const std::vector<ProductTerm>& products,
                          const Assignment& x);
BigInt eval_product_part(const Constraint& c, const Assignment& x);

BigInt eval_objective(const ProblemInstance& inst, const Assignment& x);

/// Per-constraint remaining capacity c~_k = c_k + P_k - g_k(x) where g_k is
/// the shifted left-hand side; x is feasible for k iff the entry is >= 0.
std::vector<BigInt> remaining_capacities(const ProblemInstance& inst,
                                         const Assignment& x);

/// Sum of the negative remaining capacities; 0 iff x is feasible.
BigInt violation(const ProblemInstance& inst, const Assignment& x);

bool is_feasible(const ProblemInstance& inst, const Assignment& x);

// --- JSON instance files -------------------------------------------------

ProblemInstance instance_from_json(const std::string& text);
std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& inst, const std::string& path);

}  // namespace cbqs
