#include "cbqs/bench.hpp"
#include "cbqs/resources.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  nlohmann::ordered_json err{{"error", message}, {"context", context}};
  std::cerr << err.dump() << "\n";
  std::exit(1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<cbqs::ProblemInstance> load_instances(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("no .json instances in " + dir);
  std::vector<cbqs::ProblemInstance> instances;
  instances.reserve(paths.size());
  for (const auto& p : paths) instances.push_back(cbqs::load_instance(p));
  return instances;
}

std::map<std::string, double> load_qbnb_nodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open node-count file: " + path);
  nlohmann::json j;
  in >> j;
  std::map<std::string, double> nodes;
  for (const auto& [key, value] : j.items()) nodes[key] = value.get<double>();
  return nodes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biased quantum-search simulator and benchmark harness"};
  app.require_subcommand(1);

  // --- generate ---
  auto* gen = app.add_subcommand("generate", "Write benchmark instances");
  cbqs::GeneratorParams gp;
  int gen_count = 1;
  std::string gen_out;
  gen->add_option("--n", gp.n, "variables per instance")->required();
  gen->add_option("--seed", gp.seed, "seed of the first instance");
  gen->add_option("--count", gen_count, "number of instances");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--coeff-lo", gp.coeff_lo, "minimum coefficient");
  gen->add_option("--coeff-hi", gp.coeff_hi, "maximum coefficient");
  gen->add_option("--density", gp.density, "pair keep probability");
  gen->add_option("--tightness1", gp.tightness1, "LE cap placement in (0,1)");
  gen->add_option("--tightness2", gp.tightness2, "GE cap placement in (0,1)");

  // --- run ---
  auto* run = app.add_subcommand("run", "Run methods over an instance directory");
  std::string run_instances, run_methods = "cbqs", run_out, qbnb_file;
  cbqs::RunConfig rc;
  rc.search.M = 0;  // derive budget_m(n) unless overridden
  rc.search.amplitude_mode = cbqs::AmplitudeMode::Empirical;
  std::string amplitude = "empirical", lb_mode = "simple";
  int threads = 0;
  run->add_option("--instances", run_instances, "instance directory")->required();
  run->add_option("--methods", run_methods, "comma list: cbqs,grover,sa,brute,qbnb");
  run->add_option("--out", run_out, "report file (JSON)")->required();
  run->add_option("--d", rc.search.d, "schedule base in (1,2)");
  run->add_option("--M", rc.search.M, "oracle budget; 0 derives (n/4)^2+1200");
  run->add_option("--amplitude", amplitude, "exact|empirical");
  run->add_option("--n-est", rc.search.n_est, "samples per amplitude estimate");
  run->add_option("--exact-cap", rc.search.exact_cap, "max n for exact mode");
  run->add_option("--seeds", rc.seeds, "runs per (instance, method)");
  run->add_option("--master-seed", rc.master_seed, "root seed");
  run->add_option("--qbnb-nodes", qbnb_file, "JSON map instance id -> tree nodes");
  run->add_option("--sa-steps", rc.sa.steps, "annealing steps");
  run->add_option("--sa-tmax", rc.sa.t_max, "start temperature");
  run->add_option("--sa-tmin", rc.sa.t_min, "end temperature");
  run->add_option("--sa-penalty", rc.sa.penalty_weight, "violation penalty weight");
  run->add_option("--grover-trials", rc.grover_trials, "baseline Monte Carlo trials");
  run->add_option("--brute-cap", rc.brute_cap, "max n for exhaustive methods");
  run->add_option("--gate-ns", rc.gate_time_ns, "quantum cycle time in ns");
  run->add_option("--lb-mode", lb_mode, "simple|tight product lower bound");
  run->add_flag("--structural-product-check",
                "ignore assigned values in the remaining-base test");
  run->add_flag("--no-retarget", "keep the bias aimed at the all-zeros assignment");
  run->add_flag("--count-prep", "charge the per-round state preparation to m_tot");
  run->add_flag("--measure-walltime",
                "record measured wall seconds (report is no longer run-to-run identical)");
  run->add_option("--threads", threads, "OpenMP worker count (0 = default)");

  // --- report ---
  auto* rep = app.add_subcommand("report", "Convert or pivot a report file");
  std::string rep_in, rep_format = "csv", rep_pivot, rep_out;
  rep->add_option("--in", rep_in, "report JSON produced by run")->required();
  rep->add_option("--format", rep_format, "csv|json");
  rep->add_option("--pivot", rep_pivot, "fig1|incumbents (CSV only)");
  rep->add_option("--out", rep_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      fs::create_directories(gen_out);
      for (int i = 0; i < gen_count; ++i) {
        cbqs::GeneratorParams p = gp;
        p.seed = gp.seed + static_cast<std::uint64_t>(i);
        const cbqs::ProblemInstance inst = cbqs::generate_instance(p);
        cbqs::save_instance(inst, (fs::path(gen_out) / (inst.id + ".json")).string());
      }
      return 0;
    }

    if (run->parsed()) {
#ifdef _OPENMP
      if (threads > 0) omp_set_num_threads(threads);
#endif
      if (amplitude == "exact") {
        rc.search.amplitude_mode = cbqs::AmplitudeMode::Exact;
      } else if (amplitude != "empirical") {
        throw std::runtime_error("--amplitude must be exact or empirical");
      }
      if (lb_mode == "tight") {
        rc.search.sampler.lb_mode = cbqs::LbMode::Tight;
      } else if (lb_mode != "simple") {
        throw std::runtime_error("--lb-mode must be simple or tight");
      }
      rc.search.sampler.exact_product_check = !run->count("--structural-product-check");
      rc.search.retarget_bias = !run->count("--no-retarget");
      rc.search.count_state_prep = run->count("--count-prep") > 0;
      rc.measure_walltime = run->count("--measure-walltime") > 0;
      rc.methods = split_csv(run_methods);
      if (!qbnb_file.empty()) rc.qbnb_nodes = load_qbnb_nodes(qbnb_file);

      const auto instances = load_instances(run_instances);
      const auto records = cbqs::run_experiment(instances, rc);
      cbqs::write_report(records, cbqs::ReportFormat::Json, run_out);
      std::size_t failures = 0;
      for (const auto& r : records)
        if (!r.error.empty()) ++failures;
      std::cout << records.size() << " records (" << failures << " failed) -> "
                << run_out << "\n";
      return 0;
    }

    // report
    const auto records = cbqs::load_report(rep_in);
    std::string text;
    if (!rep_pivot.empty()) {
      if (rep_format != "csv") throw std::runtime_error("pivots are CSV only");
      if (rep_pivot == "fig1") {
        text = cbqs::pivot_fig1_csv(records);
      } else if (rep_pivot == "incumbents") {
        text = cbqs::pivot_incumbents_csv(records);
      } else {
        throw std::runtime_error("--pivot must be fig1 or incumbents");
      }
    } else if (rep_format == "csv") {
      text = cbqs::records_to_csv(records);
    } else if (rep_format == "json") {
      text = cbqs::records_to_json(records);
    } else {
      throw std::runtime_error("--format must be csv or json");
    }
    if (rep_out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(rep_out);
      if (!out) throw std::runtime_error("cannot write " + rep_out);
      out << text;
      if (!out) throw std::runtime_error("write failed: " + rep_out);
    }
    return 0;
  } catch (const std::exception& e) {
    fail(app.get_subcommands().empty() ? "cli" : app.get_subcommands()[0]->get_name(),
         e.what());
  }
}
