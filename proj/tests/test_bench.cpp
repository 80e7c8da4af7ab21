#include "cbqs/bench.hpp"

#include "cbqs/baselines.hpp"
#include "doctest.h"
#include "json.hpp"

#include <filesystem>
#include <fstream>

using namespace cbqs;

namespace {

RunConfig small_run_config(std::vector<std::string> methods) {
  RunConfig rc;
  rc.methods = std::move(methods);
  rc.search.amplitude_mode = AmplitudeMode::Exact;
  rc.search.M = 0;  // derive from budget_m
  rc.sa.steps = 5000;
  rc.master_seed = 99;
  return rc;
}

}  // namespace

TEST_CASE("generator emits the full quadratic pair set at density one") {
  GeneratorParams gp;
  gp.n = 3;
  gp.seed = 1;
  const auto inst = generate_instance(gp);
  CHECK(inst.objective.terms.size() == 6);  // pairs with i <= j
  CHECK(inst.constraints.size() == 2);
  CHECK(inst.constraints[0].poly.terms.size() == 6);
  CHECK(inst.constraints[1].poly.terms.size() == 6);
  // the GE constraint is normalized: all weights negative, negative cap
  for (const Term& t : inst.constraints[1].poly.terms) CHECK(t.coeff < 0);
  CHECK(inst.constraints[1].cap <= -1);
}

TEST_CASE("generator is deterministic and records a feasible witness") {
  GeneratorParams gp;
  gp.n = 10;
  gp.seed = 42;
  const auto a = generate_instance(gp);
  const auto b = generate_instance(gp);
  CHECK(instance_to_json(a) == instance_to_json(b));

  // witness from the metadata satisfies the constraints
  const auto meta = nlohmann::json::parse(a.meta_json);
  Assignment witness;
  for (const auto& bit : meta.at("witness"))
    witness.push_back(bit.get<std::uint8_t>());
  CHECK(is_feasible(a, witness));

  // the all-zeros start violates the GE constraint by construction
  CHECK(violation(a, Assignment(10, 0)) < 0);

  // brute force confirms feasibility
  CHECK(brute_force(a).feasible);
}

TEST_CASE("run_experiment covers the methods grid") {
  CHECK(run_experiment({}, small_run_config({"brute"})).empty());
  CHECK_THROWS_AS(run_experiment({}, small_run_config({})), std::invalid_argument);
  CHECK_THROWS_AS(run_experiment({}, small_run_config({"alien"})),
                  std::invalid_argument);

  GeneratorParams gp;
  gp.n = 10;
  gp.seed = 7;
  const std::vector<ProblemInstance> instances{generate_instance(gp)};
  RunConfig rc = small_run_config({"cbqs", "brute"});
  const auto records = run_experiment(instances, rc);
  REQUIRE(records.size() == 2);
  const RunRecord& cbqs_rec = records[0];
  const RunRecord& brute_rec = records[1];
  CHECK(cbqs_rec.method == "cbqs");
  CHECK(cbqs_rec.error.empty());
  CHECK(brute_rec.method == "brute");
  REQUIRE(brute_rec.feasible);

  // heuristic value never exceeds the exhaustive optimum; equal on success
  const BigInt opt(brute_rec.final_value);
  if (cbqs_rec.feasible) {
    CHECK(BigInt(cbqs_rec.final_value) <= opt);
    CHECK(cbqs_rec.est_seconds > 0.0);
    CHECK(cbqs_rec.kappa >= 4);
  }

  // identical configuration reproduces identical records
  const auto again = run_experiment(instances, rc);
  CHECK(again == records);
}

TEST_CASE("per-run failures are recorded without aborting the batch") {
  GeneratorParams gp;
  gp.n = 10;
  gp.seed = 3;
  const std::vector<ProblemInstance> instances{generate_instance(gp)};
  RunConfig rc = small_run_config({"qbnb", "brute"});  // no node counts supplied
  const auto records = run_experiment(instances, rc);
  REQUIRE(records.size() == 2);
  CHECK_FALSE(records[0].error.empty());
  CHECK(records[1].error.empty());

  rc.qbnb_nodes[instances[0].id] = 1e5;
  const auto with_nodes = run_experiment(instances, rc);
  CHECK(with_nodes[0].error.empty());
  CHECK(with_nodes[0].oracle_calls > 0);
}

TEST_CASE("csv emission") {
  CHECK(records_to_csv({}) == "instance_id,n,method,axis,step_cost,value,feasible\n");

  RunRecord rec;
  rec.instance_id = "toy";
  rec.n = 4;
  rec.method = "cbqs";
  rec.timeline = {{"oracle_calls", 3.0, "-5", false, 1},
                  {"oracle_calls", 9.0, "12", true, 2},
                  {"oracle_calls", 21.0, "14", true, 2}};
  const std::string csv = records_to_csv({rec});
  CHECK(csv ==
        "instance_id,n,method,axis,step_cost,value,feasible\n"
        "toy,4,cbqs,oracle_calls,3,-5,0\n"
        "toy,4,cbqs,oracle_calls,9,12,1\n"
        "toy,4,cbqs,oracle_calls,21,14,1\n");
}

TEST_CASE("json report round-trip is exact") {
  GeneratorParams gp;
  gp.n = 9;
  gp.seed = 11;
  const std::vector<ProblemInstance> instances{generate_instance(gp)};
  RunConfig rc = small_run_config({"cbqs", "sa", "grover"});
  rc.seeds = 2;
  const auto records = run_experiment(instances, rc);
  const std::string text = records_to_json(records);
  const auto parsed = records_from_json(text);
  CHECK(parsed == records);
  CHECK(records_to_json(parsed) == text);

  CHECK_THROWS_AS(records_from_json("nope"), std::runtime_error);
  CHECK_THROWS_AS(records_from_json("{\"records\": [{}]}"), std::runtime_error);
}

TEST_CASE("full pipeline is byte-identical across repeated invocations") {
  const auto tmp = std::filesystem::temp_directory_path() / "cbqs_bench_test";
  std::filesystem::create_directories(tmp);

  const auto run_once = [&](const std::string& tag) {
    std::vector<ProblemInstance> instances;
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      GeneratorParams gp;
      gp.n = 8;
      gp.seed = seed;
      instances.push_back(generate_instance(gp));
    }
    RunConfig rc = small_run_config({"cbqs", "brute", "sa"});
    rc.seeds = 2;
    const auto records = run_experiment(instances, rc);
    const auto path = (tmp / (tag + ".json")).string();
    write_report(records, ReportFormat::Json, path);
    return records;
  };

  const auto first = run_once("a");
  const auto second = run_once("b");
  CHECK(first == second);

  std::ifstream fa(tmp / "a.json"), fb(tmp / "b.json");
  const std::string ta((std::istreambuf_iterator<char>(fa)),
                       std::istreambuf_iterator<char>());
  const std::string tb((std::istreambuf_iterator<char>(fb)),
                       std::istreambuf_iterator<char>());
  CHECK(ta == tb);
  CHECK(records_to_csv(first) == records_to_csv(second));

  const auto loaded = load_report((tmp / "a.json").string());
  CHECK(loaded == first);
}

TEST_CASE("pivots stay in sync with the records") {
  GeneratorParams gp;
  gp.n = 8;
  gp.seed = 5;
  const std::vector<ProblemInstance> instances{generate_instance(gp)};
  RunConfig rc = small_run_config({"cbqs", "brute"});
  const auto records = run_experiment(instances, rc);

  const std::string fig1 = pivot_fig1_csv(records);
  CHECK(fig1.find("cbqs") != std::string::npos);
  CHECK(fig1.find("brute") != std::string::npos);

  const std::string curves = pivot_incumbents_csv(records);
  CHECK(curves.find("oracle_calls") != std::string::npos);
  CHECK(curves.find("seconds") != std::string::npos);  // derived cbqs axis
}
