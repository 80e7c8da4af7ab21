#include "cbqs/problem.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbqs {

namespace {

void check_index_set(std::vector<std::int32_t>& vars, std::int32_t n,
                     const char* what) {
  std::sort(vars.begin(), vars.end());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i] < 1 || vars[i] > n)
      throw std::invalid_argument(std::string(what) + ": index out of range [1, n]");
    if (i > 0 && vars[i] == vars[i - 1])
      throw std::invalid_argument(std::string(what) + ": duplicate index in set");
  }
}

bool x_at(const Assignment& x, std::int32_t var) {
  return x[static_cast<std::size_t>(var - 1)] != 0;
}

}  // namespace

void canonicalize(Polynomial& poly) {
  for (auto& t : poly.terms) {
    if (t.coeff == 0) throw std::invalid_argument("polynomial: zero coefficient");
    if (t.coeff == INT64_MIN)
      throw std::invalid_argument("polynomial: coefficient magnitude too large");
    check_index_set(t.vars, poly.n, "polynomial");
  }
  std::sort(poly.terms.begin(), poly.terms.end(),
            [](const Term& a, const Term& b) { return a.vars < b.vars; });
  for (std::size_t i = 1; i < poly.terms.size(); ++i) {
    if (poly.terms[i].vars == poly.terms[i - 1].vars)
      throw std::invalid_argument("polynomial: duplicate index set");
  }
}

void canonicalize(std::vector<ProductTerm>& products, std::int32_t n) {
  std::erase_if(products, [](const ProductTerm& p) { return p.alpha == 0; });
  for (auto& p : products) {
    if (p.alpha != 1 && p.alpha != -1)
      throw std::invalid_argument("product term: alpha must be in {-1, 0, 1}");
    for (auto& b : p.bases) {
      if (b.base == 0) throw std::invalid_argument("product term: zero base");
      if (b.base == INT64_MIN)
        throw std::invalid_argument("product term: base magnitude too large");
      if (b.vars.empty())
        throw std::invalid_argument("product term: empty index set in base");
      check_index_set(b.vars, n, "product term");
    }
    std::sort(p.bases.begin(), p.bases.end(),
              [](const ProductFactor& a, const ProductFactor& b) {
                return a.vars < b.vars;
              });
    for (std::size_t i = 1; i < p.bases.size(); ++i) {
      if (p.bases[i].vars == p.bases[i - 1].vars)
        throw std::invalid_argument("product term: duplicate base index set");
    }
  }
}

Constraint make_constraint(Polynomial poly, std::vector<ProductTerm> products,
                           std::int64_t cap, Sense sense) {
  canonicalize(poly);
  canonicalize(products, poly.n);

  Wide wide_cap = cap;
  if (sense == Sense::GE) {
    for (auto& t : poly.terms) t.coeff = -t.coeff;
    for (auto& p : products) p.alpha = -p.alpha;
    wide_cap = -wide_cap;
  }
  // Fold the constant term into the cap so index logic never sees S = {}.
  auto it = std::find_if(poly.terms.begin(), poly.terms.end(),
                         [](const Term& t) { return t.vars.empty(); });
  if (it != poly.terms.end()) {
    wide_cap = checked_sub(wide_cap, it->coeff);
    poly.terms.erase(it);
  }

  Constraint c;
  c.poly = std::move(poly);
  c.products = std::move(products);
  c.cap = narrow_i64(wide_cap);
  return c;
}

ProblemInstance make_instance(std::int32_t n, Polynomial objective,
                              std::vector<ProductTerm> objective_products,
                              std::vector<Constraint> constraints) {
  if (n < 0) throw std::invalid_argument("instance: negative variable count");
  if (objective.n != n) throw std::invalid_argument("instance: objective.n mismatch");
  canonicalize(objective);
  canonicalize(objective_products, n);
  for (auto& c : constraints) {
    if (c.poly.n != n)
      throw std::invalid_argument("instance: constraint variable count mismatch");
  }
  ProblemInstance inst;
  inst.n = n;
  inst.objective = std::move(objective);
  inst.objective_products = std::move(objective_products);
  inst.constraints = std::move(constraints);
  inst.shifts.reserve(inst.constraints.size());
  for (const auto& c : inst.constraints) inst.shifts.push_back(shift_of(c));
  return inst;
}

std::int64_t shift_of(const Constraint& c) {
  Wide sum = 0;
  for (const auto& t : c.poly.terms) {
    if (t.coeff < 0) sum = checked_add(sum, -Wide(t.coeff));
  }
  return narrow_i64(sum);
}

Wide eval_polynomial(const Polynomial& poly, const Assignment& x) {
  if (x.size() != static_cast<std::size_t>(poly.n))
    throw std::invalid_argument("eval_polynomial: assignment length mismatch");
  Wide sum = 0;
  for (const auto& t : poly.terms) {
    bool open = false;
    for (std::int32_t v : t.vars) {
      if (!x_at(x, v)) {
        open = true;
        break;
      }
    }
    if (!open) sum = checked_add(sum, t.coeff);
  }
  return sum;
}

BigInt eval_product_terms(const std::vector<ProductTerm>& products,
                          const Assignment& x) {
  BigInt sum = 0;
  for (const auto& p : products) {
    BigInt prod = 1;
    for (const auto& b : p.bases) {
      bool all_one = true;
      for (std::int32_t v : b.vars) {
        if (!x_at(x, v)) {
          all_one = false;
          break;
        }
      }
      if (all_one) prod *= b.base;  // pow(w', 0) = 1 otherwise
    }
    sum += p.alpha * prod;
  }
  return sum;
}

BigInt eval_product_part(const Constraint& c, const Assignment& x) {
  return eval_product_terms(c.products, x);
}

BigInt eval_objective(const ProblemInstance& inst, const Assignment& x) {
  BigInt v = to_big(eval_polynomial(inst.objective, x));
  if (!inst.objective_products.empty())
    v += eval_product_terms(inst.objective_products, x);
  return v;
}

std::vector<BigInt> remaining_capacities(const ProblemInstance& inst,
                                         const Assignment& x) {
  if (x.size() != static_cast<std::size_t>(inst.n))
    throw std::invalid_argument("remaining_capacities: assignment length mismatch");
  std::vector<BigInt> caps;
  caps.reserve(inst.constraints.size());
  for (const auto& c : inst.constraints) {
    // c + P - (shifted lhs) collapses to c - poly(x) - products(x).
    BigInt r = c.cap;
    r -= to_big(eval_polynomial(c.poly, x));
    if (!c.products.empty()) r -= eval_product_part(c, x);
    caps.push_back(std::move(r));
  }
  return caps;
}

BigInt violation(const ProblemInstance& inst, const Assignment& x) {
  BigInt v = 0;
  for (const auto& cap : remaining_capacities(inst, x)) {
    if (cap < 0) v += cap;
  }
  return v;
}

bool is_feasible(const ProblemInstance& inst, const Assignment& x) {
  return violation(inst, x) == 0;
}

}  // namespace cbqs
