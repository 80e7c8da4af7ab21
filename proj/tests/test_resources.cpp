#include "cbqs/resources.hpp"

#include "cbqs/bench.hpp"
#include "doctest.h"

#include <cmath>

using namespace cbqs;

// Expected values below were computed with a separate calculator over the
// published depth formulas before this module was written.

TEST_CASE("adder chain cycles") {
  CHECK(ca_cycles(0, 8) == 0);
  CHECK(ca_cycles(4, 8) == 36);
  CHECK(ca_cycles(1, 2) == 5);
  CHECK(ca_cycles(100, 32) == 1300);
  CHECK_THROWS_AS(ca_cycles(-1, 8), std::invalid_argument);
  CHECK_THROWS_AS(ca_cycles(1, 1), std::invalid_argument);
}

TEST_CASE("carry-lookahead adder depth") {
  CHECK(ca2_cycles(8) == 21);
  CHECK(ca2_cycles(16) == 25);
  CHECK(ca2_cycles(4) == 17);
  CHECK(ca2_cycles(32) == 29);
  CHECK_THROWS_AS(ca2_cycles(3), std::invalid_argument);
}

TEST_CASE("constraint check and objective depths") {
  CHECK(constraint_check_cycles(4, 8) == 720);
  CHECK(constraint_check_cycles(0, 8) == 0);
  CHECK(constraint_check_cycles(1, 8) == 126);
  CHECK(objective_cycles(4, 8) == 90);
  CHECK(objective_cycles(1, 8) == 9);
  CHECK(objective_cycles(0, 8) == 0);
}

TEST_CASE("runtime composition") {
  const auto model = ResourceModel::make(100, 32);
  CHECK(model.cycles_per_grover_iteration == 714529);
  CHECK(runtime_seconds(0, model) == 0.0);
  CHECK(runtime_seconds(1, model) == doctest::Approx(4.6444385e-3).epsilon(1e-12));
  CHECK(runtime_seconds(1825, model) ==
        doctest::Approx(8.4761002625).epsilon(1e-12));
  const auto unit = ResourceModel{0, 4, 6.5, 1000};
  CHECK(runtime_seconds(1, unit) == doctest::Approx(6.5e-6));
  CHECK_THROWS_AS(runtime_seconds(-1, model), std::invalid_argument);
}

TEST_CASE("derived register width leaves headroom") {
  GeneratorParams gp;
  gp.n = 10;
  gp.seed = 4;
  const auto inst = generate_instance(gp);
  const auto kappa = derive_kappa(inst);
  Wide max_cap = 0;
  for (std::size_t k = 0; k < inst.constraints.size(); ++k)
    max_cap = std::max(max_cap, Wide(inst.constraints[k].cap) + inst.shifts[k]);
  CHECK((Wide(1) << (kappa - 1)) > max_cap);
  CHECK(kappa >= 2);
  const auto model = ResourceModel::for_instance(inst);
  CHECK(model.kappa >= 4);
}

TEST_CASE("qbnb query count") {
  CHECK(qbnb_oracle_calls(100, 1e6) == doctest::Approx(1.2014000334e8).epsilon(1e-6));
  CHECK(qbnb_oracle_calls(1, 2) == 0.0);  // log2(1 * log2 2) = 0
  CHECK(qbnb_oracle_calls(100, 2e6) > qbnb_oracle_calls(100, 1e6));
  CHECK(qbnb_oracle_calls(200, 1e6) > qbnb_oracle_calls(100, 1e6));
  CHECK_THROWS_AS(qbnb_oracle_calls(0, 10), std::invalid_argument);
  CHECK_THROWS_AS(qbnb_oracle_calls(10, 1), std::invalid_argument);
}

TEST_CASE("oracle budget") {
  CHECK(budget_m(100) == 1825);
  CHECK(budget_m(4) == 1201);
  CHECK(budget_m(0) == 1200);
  CHECK(budget_m(10) == 1206);  // (2.5)^2 = 6.25 rounds half-up to 6
  CHECK(budget_m(6) == 1202);
  CHECK(budget_m(2) == 1200);
}

TEST_CASE("formula monotonicity") {
  for (int k = 4; k <= 64; k *= 2) {
    CHECK(ca_cycles(10, 2 * k) >= ca_cycles(10, k));
    CHECK(ca2_cycles(2 * k) >= ca2_cycles(k));
  }
  for (int n = 1; n <= 128; n *= 2) {
    CHECK(constraint_check_cycles(2 * n, 16) > constraint_check_cycles(n, 16));
    CHECK(objective_cycles(2 * n, 16) > objective_cycles(n, 16));
    CHECK(budget_m(2 * n) >= budget_m(n));
  }
}

TEST_CASE("uniform-preparation baseline follows the schedule expectation") {
  {
    // every state marked: the first round always succeeds, E[2j+1] = 4
    Rng rng(2);
    const double mean = grover_baseline_calls(3, 8, 4000, rng);
    CHECK(mean == doctest::Approx(4.0).epsilon(0.05));
  }
  {
    // single marked state in 2^10: compare with the forward expectation
    Rng rng(3);
    const double mean = grover_baseline_calls(10, 1, 2000, rng);
    CHECK(mean > 93.98 / 2);
    CHECK(mean < 93.98 * 2);
  }
  Rng rng(4);
  CHECK_THROWS_AS(grover_baseline_calls(4, 0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(grover_baseline_calls(4, 17, 10, rng), std::invalid_argument);
}
