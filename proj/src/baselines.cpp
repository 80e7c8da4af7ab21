#include "cbqs/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace cbqs {

namespace {

void mask_to_assignment(std::uint64_t mask, std::int32_t n, Assignment& x) {
  for (std::int32_t j = 0; j < n; ++j)
    x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((mask >> j) & 1ULL);
}

// objective descending, then lexicographically smallest assignment
bool better(const BruteForceResult& cand, const BruteForceResult& best) {
  if (!best.feasible) return cand.feasible;
  if (!cand.feasible) return false;
  if (cand.objective != best.objective) return cand.objective > best.objective;
  return cand.x < best.x;
}

void check_cap(const ProblemInstance& inst, std::int32_t max_n) {
  if (inst.n > max_n || inst.n > 62)
    throw std::invalid_argument("brute force refused: n exceeds the cap");
}

}  // namespace

BruteForceResult brute_force_serial(const ProblemInstance& inst, std::int32_t max_n) {
  check_cap(inst, max_n);
  const std::uint64_t total = 1ULL << inst.n;
  BruteForceResult best;
  Assignment x(static_cast<std::size_t>(inst.n));
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    mask_to_assignment(mask, inst.n, x);
    if (!is_feasible(inst, x)) continue;
    BruteForceResult cand{true, x, eval_objective(inst, x)};
    if (better(cand, best)) best = std::move(cand);
  }
  return best;
}

BruteForceResult brute_force(const ProblemInstance& inst, std::int32_t max_n) {
  check_cap(inst, max_n);
  const auto total = static_cast<std::int64_t>(1ULL << inst.n);
  BruteForceResult best;
#pragma omp parallel
  {
    BruteForceResult local;
    Assignment x(static_cast<std::size_t>(inst.n));
#pragma omp for schedule(static) nowait
    for (std::int64_t mask = 0; mask < total; ++mask) {
      mask_to_assignment(static_cast<std::uint64_t>(mask), inst.n, x);
      if (!is_feasible(inst, x)) continue;
      BruteForceResult cand{true, x, eval_objective(inst, x)};
      if (better(cand, local)) local = std::move(cand);
    }
#pragma omp critical
    {
      if (better(local, best)) best = std::move(local);
    }
  }
  return best;
}

std::uint64_t count_feasible_optimal(const ProblemInstance& inst,
                                     const BigInt& target, std::int32_t max_n) {
  check_cap(inst, max_n);
  const auto total = static_cast<std::int64_t>(1ULL << inst.n);
  std::int64_t count = 0;
#pragma omp parallel
  {
    Assignment x(static_cast<std::size_t>(inst.n));
#pragma omp for reduction(+ : count) schedule(static)
    for (std::int64_t mask = 0; mask < total; ++mask) {
      mask_to_assignment(static_cast<std::uint64_t>(mask), inst.n, x);
      if (is_feasible(inst, x) && eval_objective(inst, x) >= target) ++count;
    }
  }
  return static_cast<std::uint64_t>(count);
}

namespace {

/// Incremental polynomial value: terms indexed by member variable so a bit
/// flip costs only the terms containing it.
class PolyTracker {
 public:
  PolyTracker(const Polynomial& poly, const Assignment& x) {
    by_var_.resize(static_cast<std::size_t>(poly.n) + 1);
    for (const Term& t : poly.terms) {
      for (std::int32_t v : t.vars) by_var_[static_cast<std::size_t>(v)].push_back(&t);
    }
    value_ = eval_polynomial(poly, x);
  }

  Wide value() const { return value_; }

  /// Change in value if bit j flips (positive when the product terms close).
  Wide flip_delta(std::int32_t j, const Assignment& x) const {
    Wide delta = 0;
    for (const Term* t : by_var_[static_cast<std::size_t>(j)]) {
      bool others_one = true;
      for (std::int32_t v : t->vars) {
        if (v == j) continue;
        if (!x[static_cast<std::size_t>(v - 1)]) {
          others_one = false;
          break;
        }
      }
      if (others_one) delta = checked_add(delta, t->coeff);
    }
    return x[static_cast<std::size_t>(j - 1)] ? -delta : delta;
  }

  void apply(Wide delta) { value_ = checked_add(value_, delta); }

 private:
  std::vector<std::vector<const Term*>> by_var_;
  Wide value_ = 0;
};

}  // namespace

SAResult simulated_annealing(const ProblemInstance& inst, const SAConfig& cfg,
                             Rng& rng) {
  if (cfg.steps < 1) throw std::invalid_argument("sa: steps must be >= 1");
  if (!(cfg.t_max > cfg.t_min && cfg.t_min > 0))
    throw std::invalid_argument("sa: need t_max > t_min > 0");
  if (!(cfg.penalty_weight > 0))
    throw std::invalid_argument("sa: penalty weight must be positive");

  const auto t_start = std::chrono::steady_clock::now();
  SAResult out;
  if (inst.n == 0) {
    out.best = {};
    out.objective = eval_objective(inst, out.best);
    out.feasible = is_feasible(inst, out.best);
    if (out.feasible) out.timeline.emplace_back(0, out.objective);
    return out;
  }

  Assignment x(static_cast<std::size_t>(inst.n));
  for (auto& b : x) b = rng.bernoulli(0.5) ? 1 : 0;

  PolyTracker obj_poly(inst.objective, x);
  std::vector<PolyTracker> cons;
  cons.reserve(inst.constraints.size());
  for (const Constraint& c : inst.constraints) cons.emplace_back(c.poly, x);

  const auto objective_of = [&]() -> BigInt {
    BigInt v = to_big(obj_poly.value());
    if (!inst.objective_products.empty())
      v += eval_product_terms(inst.objective_products, x);
    return v;
  };
  const auto violation_of = [&]() -> BigInt {
    BigInt total = 0;
    for (std::size_t k = 0; k < cons.size(); ++k) {
      BigInt rest = inst.constraints[k].cap;
      rest -= to_big(cons[k].value());
      if (!inst.constraints[k].products.empty())
        rest -= eval_product_part(inst.constraints[k], x);
      if (rest < 0) total += rest;
    }
    return total;
  };
  const auto energy_of = [&](const BigInt& obj, const BigInt& viol) {
    return -obj.convert_to<double>() +
           cfg.penalty_weight * (-viol).convert_to<double>();
  };

  BigInt cur_obj = objective_of();
  BigInt cur_viol = violation_of();
  double energy = energy_of(cur_obj, cur_viol);

  BruteForceResult best_feasible;  // reuse the comparison bookkeeping shape
  Assignment best_energy_x = x;
  double best_energy = energy;
  const auto consider = [&](std::int64_t step) {
    if (cur_viol == 0) {
      if (!best_feasible.feasible || cur_obj > best_feasible.objective) {
        best_feasible = {true, x, cur_obj};
        out.timeline.emplace_back(step, cur_obj);
      }
    }
    if (energy < best_energy) {
      best_energy = energy;
      best_energy_x = x;
    }
  };
  consider(0);

  const double ratio = cfg.t_min / cfg.t_max;
  for (std::int64_t step = 0; step < cfg.steps; ++step) {
    const double frac =
        cfg.steps == 1 ? 0.0 : static_cast<double>(step) / static_cast<double>(cfg.steps - 1);
    const double temp = cfg.t_max * std::pow(ratio, frac);

    const auto j = static_cast<std::int32_t>(rng.uniform_int(1, inst.n));
    const Wide d_obj = obj_poly.flip_delta(j, x);
    std::vector<Wide> d_cons(cons.size());
    for (std::size_t k = 0; k < cons.size(); ++k) d_cons[k] = cons[k].flip_delta(j, x);

    // tentative flip
    x[static_cast<std::size_t>(j - 1)] ^= 1;
    obj_poly.apply(d_obj);
    for (std::size_t k = 0; k < cons.size(); ++k) cons[k].apply(d_cons[k]);

    const BigInt new_obj = objective_of();
    const BigInt new_viol = violation_of();
    const double new_energy = energy_of(new_obj, new_viol);
    const double diff = new_energy - energy;
    if (diff <= 0.0 || rng.next_double() < std::exp(-diff / temp)) {
      cur_obj = new_obj;
      cur_viol = new_viol;
      energy = new_energy;
      consider(step + 1);
    } else {  // revert
      x[static_cast<std::size_t>(j - 1)] ^= 1;
      obj_poly.apply(-d_obj);
      for (std::size_t k = 0; k < cons.size(); ++k) cons[k].apply(-d_cons[k]);
    }
  }

  if (best_feasible.feasible) {
    out.best = best_feasible.x;
    out.objective = best_feasible.objective;
    out.feasible = is_feasible(inst, out.best);  // re-checked exactly
  } else {
    out.best = best_energy_x;
    out.objective = eval_objective(inst, out.best);
    out.feasible = false;
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace cbqs
