#include "cbqs/search.hpp"

#include "cbqs/amplification.hpp"
#include "cbqs/baselines.hpp"
#include "cbqs/bench.hpp"
#include "cbqs/resources.hpp"
#include "doctest.h"

#include <cmath>

using namespace cbqs;

namespace {

Polynomial poly(std::int32_t n, std::vector<Term> terms) {
  Polynomial p{n, std::move(terms)};
  canonicalize(p);
  return p;
}

Assignment bits(std::initializer_list<int> values) {
  Assignment x;
  for (int v : values) x.push_back(static_cast<std::uint8_t>(v));
  return x;
}

ProblemInstance unconstrained(std::int32_t n) {
  std::vector<Term> obj;
  for (std::int32_t i = 1; i <= n; ++i) obj.push_back({{i}, 1});
  return make_instance(n, poly(n, std::move(obj)), {}, {});
}

// Forward expectation of m_tot for the exponential schedule at good mass a,
// independent of the implementation under test.
double expected_mtot(double a, double d, double tail = 1e-13) {
  const double theta = std::asin(std::sqrt(a));
  double expect = 0.0;
  double alive = 1.0;
  std::int64_t l = 0;
  while (alive > tail && l < 4000) {
    ++l;
    const auto m = static_cast<std::int64_t>(std::ceil(std::pow(d, static_cast<double>(l))));
    double cost = 0.0, p_round = 0.0;
    for (std::int64_t j = 1; j <= m; ++j) {
      const double s = std::sin(static_cast<double>(2 * j + 1) * theta);
      cost += static_cast<double>(2 * j + 1) / static_cast<double>(m);
      p_round += s * s / static_cast<double>(m);
    }
    expect += alive * cost;
    alive *= 1.0 - p_round;
  }
  return expect;
}

SearchConfig exact_config(std::int64_t M, double d = 1.2) {
  SearchConfig cfg;
  cfg.d = d;
  cfg.M = M;
  cfg.amplitude_mode = AmplitudeMode::Exact;
  return cfg;
}

}  // namespace

TEST_CASE("amplitude in exact and empirical modes") {
  const auto inst = unconstrained(2);
  const auto bias = BiasProfile::with_probabilities({0.5, 0.5});
  SearchConfig cfg = exact_config(100);
  CHECK(amplitude(inst, bias, [](const Sample&) { return true; }, cfg) == 1.0);
  CHECK(amplitude(inst, bias, [](const Sample&) { return false; }, cfg) == 0.0);
  const auto corner = [](const Sample& s) { return s.x == bits({1, 1}); };
  CHECK(amplitude(inst, bias, corner, cfg) == doctest::Approx(0.25));

  cfg.amplitude_mode = AmplitudeMode::Empirical;
  cfg.n_est = 10000;
  cfg.seed = 5;
  const double est = amplitude(inst, bias, corner, cfg);
  CHECK(std::abs(est - 0.25) < 5 * std::sqrt(0.25 * 0.75 / 10000.0));
  // zero count clamps to the resolution floor
  CHECK(amplitude(inst, bias, [](const Sample&) { return false; }, cfg) ==
        doctest::Approx(1.0 / 40000.0));

  SearchConfig capped = exact_config(10);
  capped.exact_cap = 1;
  CHECK_THROWS_AS(amplitude(inst, bias, corner, capped), std::invalid_argument);
}

TEST_CASE("round success law at fixed iterate counts") {
  // a = 1/4, j = 1: sin^2(3 asin(1/2)) = 1
  CHECK(success_probability(0.25, 1) == doctest::Approx(1.0));
  CHECK(success_probability(0.5, 3) == doctest::Approx(0.5));
  CHECK(success_probability(0.0, 5) == 0.0);
  CHECK(success_probability(1.0, 7) == 1.0);

  Rng rng(11);
  const double a = 1.0 / 16.0;
  for (const std::int64_t j : {1, 2, 5}) {
    const double p = success_probability(a, j);
    int hits = 0;
    const int rounds = 20000;
    for (int i = 0; i < rounds; ++i) hits += round_succeeds(a, j, rng) ? 1 : 0;
    const double se = std::sqrt(p * (1 - p) / rounds);
    CHECK(std::abs(hits / static_cast<double>(rounds) - p) <= 4 * se + 1e-12);
  }
}

TEST_CASE("qsearch succeeds immediately at full amplitude") {
  const auto inst = unconstrained(2);
  const auto bias = BiasProfile::with_probabilities({0.5, 0.5});
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto res = qsearch(inst, bias, [](const Sample&) { return true; },
                             exact_config(1000), rng);
    CHECK(res.success);
    REQUIRE(res.rounds.size() == 1);
    CHECK(res.rounds[0].m == 2);  // ceil(1.2^1)
    CHECK(res.rounds[0].j >= 1);
    CHECK(res.rounds[0].j <= 2);
    CHECK(res.m_tot == 2 * res.rounds[0].j + 1);
  }
}

TEST_CASE("qsearch exhausts the budget on an unsatisfiable predicate") {
  const auto inst = unconstrained(3);
  const auto bias = BiasProfile::toward_zero(3);
  Rng rng(4);
  const auto res = qsearch(inst, bias, [](const Sample&) { return false; },
                           exact_config(100), rng);
  CHECK_FALSE(res.success);
  CHECK(res.m_tot >= 100);
  std::int64_t total = 0;
  for (const auto& r : res.rounds) total += 2 * r.j + 1;
  CHECK(total == res.m_tot);  // m_tot accounting is exactly sum of 2j+1
}

TEST_CASE("qsearch cost tracks the schedule expectation for one good state") {
  const auto inst = unconstrained(4);
  const auto bias = BiasProfile::with_probabilities({0.5, 0.5, 0.5, 0.5});
  const auto target = [](const Sample& s) { return s.x == bits({1, 0, 1, 1}); };
  Rng rng(17);
  const int trials = 3000;
  double total = 0.0;
  for (int i = 0; i < trials; ++i) {
    const auto res = qsearch(inst, bias, target, exact_config(1000000), rng);
    CHECK(res.success);
    CHECK(target(res.sample));  // conditional draws satisfy the predicate
    total += static_cast<double>(res.m_tot);
  }
  const double mean = total / trials;
  const double expected = expected_mtot(1.0 / 16.0, 1.2);
  CHECK(mean > expected / 2);
  CHECK(mean < expected * 2);
}

TEST_CASE("qsearch_violation returns the measured violation") {
  {
    // x = 0 is feasible: any measurement has violation 0 > any T < 0
    const auto inst = make_instance(
        2, poly(2, {{{1}, 3}}), {},
        {make_constraint(poly(2, {{{1}, 2}, {{2}, 1}}), {}, 5, Sense::LE)});
    Rng rng(8);
    const auto res = qsearch_violation(inst, BiasProfile::toward_zero(2), BigInt(-100),
                                       exact_config(1000), rng);
    CHECK(res.success);
    CHECK(res.v == 0);
    CHECK(res.v == res.sample.violation);
  }
  {
    // infeasible instance: violations improve but stay negative
    const auto inst = make_instance(
        2, poly(2, {}), {},
        {make_constraint(poly(2, {{{1}, 1}, {{2}, 1}}), {}, 5, Sense::GE),
         make_constraint(poly(2, {{{1}, 1}, {{2}, 1}}), {}, 1, Sense::LE)});
    Rng rng(9);
    const BigInt t0 = violation(inst, bits({0, 0}));
    REQUIRE(t0 < 0);
    const auto res = qsearch_violation(inst, BiasProfile::toward_zero(2), t0,
                                       exact_config(500), rng);
    if (res.success) CHECK(res.v > t0);
    CHECK_THROWS_AS(qsearch_violation(inst, BiasProfile::toward_zero(2), BigInt(1),
                                      exact_config(10), rng),
                    std::invalid_argument);
  }
}

TEST_CASE("qmaxsearch climbs to the single-variable optimum") {
  const auto inst = make_instance(
      1, poly(1, {{{1}, 1}}), {},
      {make_constraint(poly(1, {{{1}, 1}}), {}, 1, Sense::LE)});
  Rng rng(5);
  const auto trace = qmaxsearch(inst, exact_config(500), rng);
  CHECK(trace.found_feasible);
  CHECK(trace.best_value == 1);
  CHECK(trace.best == bits({1}));
  REQUIRE(!trace.incumbents.empty());
  CHECK(trace.incumbents.back().value == 1);
}

TEST_CASE("qmaxsearch with zero budget returns an empty flagged trace") {
  const auto inst = unconstrained(3);
  Rng rng(6);
  const auto trace = qmaxsearch(inst, exact_config(0), rng);
  CHECK(trace.incumbents.empty());
  CHECK_FALSE(trace.found_feasible);
  CHECK(trace.m_tot == 0);
}

TEST_CASE("qmaxsearch finds brute-force optima on small random instances") {
  int optimal = 0, runs = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    GeneratorParams gp;
    gp.n = 10;
    gp.seed = seed;
    const auto inst = generate_instance(gp);
    const auto opt = brute_force(inst);
    REQUIRE(opt.feasible);
    for (std::uint64_t run_seed = 0; run_seed < 5; ++run_seed) {
      Rng rng(mix_seed(seed, run_seed));
      const auto trace = qmaxsearch(inst, exact_config(10 * budget_m(gp.n)), rng);
      ++runs;
      if (trace.found_feasible && trace.best_value == opt.objective) ++optimal;
    }
  }
  CHECK(optimal >= runs * 80 / 100);
}

TEST_CASE("two-stage search skips stage one from a feasible start") {
  const auto inst = make_instance(
      2, poly(2, {{{1}, 2}, {{2}, 3}}), {},
      {make_constraint(poly(2, {{{1}, 1}, {{2}, 1}}), {}, 2, Sense::LE)});
  Rng rng(7);
  const auto trace = qmaxsearch_two_stage(inst, exact_config(500), rng);
  CHECK(trace.stage_marks.empty());  // never entered stage 1
  CHECK(trace.found_feasible);
  CHECK(trace.best_value == 5);
  for (const auto& inc : trace.incumbents) CHECK(inc.stage == 2);
}

TEST_CASE("two-stage search enters stage one when zeros are infeasible") {
  GeneratorParams gp;
  gp.n = 8;
  gp.seed = 2;
  const auto inst = generate_instance(gp);
  REQUIRE(violation(inst, Assignment(8, 0)) < 0);  // GE cap >= 1 by construction
  Rng rng(8);
  const auto trace = qmaxsearch_two_stage(inst, exact_config(10 * budget_m(gp.n)), rng);
  CHECK(trace.found_feasible);
  REQUIRE(trace.stage_marks.size() == 1);
  // violation incumbents strictly improve and precede the switch
  BigInt last_v;
  bool have_v = false;
  bool seen_stage2 = false;
  for (const auto& inc : trace.incumbents) {
    if (inc.stage == 1) {
      CHECK_FALSE(seen_stage2);  // stage 1 never resumes
      if (have_v) CHECK(inc.value > last_v);
      last_v = inc.value;
      have_v = true;
      CHECK(inc.value < 0);
    } else {
      seen_stage2 = true;
    }
  }
  // objective incumbents strictly increase in stage 2
  BigInt last_obj;
  bool have_obj = false;
  for (const auto& inc : trace.incumbents) {
    if (inc.stage != 2) continue;
    if (have_obj) CHECK(inc.value > last_obj);
    last_obj = inc.value;
    have_obj = true;
  }
  CHECK(have_obj);
  CHECK(is_feasible(inst, trace.best));
}

TEST_CASE("empirical amplitude stays near the exact value") {
  Rng rng(31);
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 12; ++seed) {
    GeneratorParams gp;
    gp.n = 10;
    gp.seed = seed;
    const auto inst = generate_instance(gp);
    const auto bias = BiasProfile::toward_zero(gp.n);
    SearchConfig cfg = exact_config(100);
    const auto feasible_pred = [](const Sample& s) { return s.violation == 0; };
    const double a_exact = amplitude(inst, bias, feasible_pred, cfg);
    if (a_exact <= 0.0) continue;
    cfg.amplitude_mode = AmplitudeMode::Empirical;
    cfg.n_est = 10000;
    cfg.seed = rng.next_u64();
    const double a_emp = amplitude(inst, bias, feasible_pred, cfg);
    const double se = std::sqrt(std::max(a_exact * (1 - a_exact), 1e-12) / cfg.n_est);
    CHECK(std::abs(a_emp - a_exact) <= 5 * se + 1e-9);
    ++checked;
  }
}

TEST_CASE("empirical-mode qsearch also reaches optima") {
  GeneratorParams gp;
  gp.n = 9;
  gp.seed = 5;
  const auto inst = generate_instance(gp);
  const auto opt = brute_force(inst);
  SearchConfig cfg;
  cfg.d = 1.2;
  cfg.M = 10 * budget_m(gp.n);
  cfg.amplitude_mode = AmplitudeMode::Empirical;
  cfg.n_est = 2000;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto trace = qmaxsearch_two_stage(inst, cfg, rng);
    if (trace.found_feasible && trace.best_value == opt.objective) ++hits;
  }
  CHECK(hits >= 3);
}
