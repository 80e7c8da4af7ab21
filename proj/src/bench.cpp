#include "cbqs/bench.hpp"

#include "cbqs/resources.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cbqs {

namespace {

using Json = nlohmann::ordered_json;

struct QuadMatrix {
  std::vector<Term> terms;  // S = {i} on the diagonal, {i, j} off it
  std::int64_t total = 0;   // value at the all-ones assignment
};

QuadMatrix draw_matrix(std::int32_t n, const GeneratorParams& p, Rng& rng) {
  QuadMatrix m;
  for (std::int32_t i = 1; i <= n; ++i) {
    for (std::int32_t j = i; j <= n; ++j) {
      if (p.density < 1.0 && !rng.bernoulli(p.density)) continue;
      Term t;
      t.vars = i == j ? std::vector<std::int32_t>{i} : std::vector<std::int32_t>{i, j};
      t.coeff = rng.uniform_int(p.coeff_lo, p.coeff_hi);
      m.total += t.coeff;
      m.terms.push_back(std::move(t));
    }
  }
  if (m.terms.empty()) {  // never emit an empty matrix at low density
    Term t;
    const auto i = static_cast<std::int32_t>(rng.uniform_int(1, n));
    t.vars = {i};
    t.coeff = rng.uniform_int(p.coeff_lo, p.coeff_hi);
    m.total = t.coeff;
    m.terms.push_back(std::move(t));
  }
  return m;
}

std::int64_t round_half_up(double v) {
  return static_cast<std::int64_t>(std::floor(v + 0.5));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ProblemInstance generate_instance(const GeneratorParams& p) {
  if (p.n < 1) throw std::invalid_argument("generator: n must be >= 1");
  if (p.coeff_lo < 1 || p.coeff_hi < p.coeff_lo)
    throw std::invalid_argument("generator: need 1 <= coeff_lo <= coeff_hi");
  if (!(p.density > 0.0 && p.density <= 1.0))
    throw std::invalid_argument("generator: density must lie in (0, 1]");
  if (!(p.tightness1 > 0.0 && p.tightness1 < 1.0) ||
      !(p.tightness2 > 0.0 && p.tightness2 < 1.0))
    throw std::invalid_argument("generator: tightness must lie in (0, 1)");

  Rng rng(p.seed);
  QuadMatrix obj = draw_matrix(p.n, p, rng);
  QuadMatrix w1 = draw_matrix(p.n, p, rng);
  QuadMatrix w2 = draw_matrix(p.n, p, rng);

  Polynomial obj_poly{p.n, obj.terms};
  Polynomial w1_poly{p.n, w1.terms};
  Polynomial w2_poly{p.n, w2.terms};

  // Witness: a random nonzero assignment whose w2 value is positive, so the
  // GE cap can sit in [1, w2(x*)].
  Assignment witness(static_cast<std::size_t>(p.n));
  Wide witness_w1 = 0, witness_w2 = 0;
  for (int tries = 0;; ++tries) {
    if (tries > 1000)
      throw std::runtime_error("generator: no usable witness; density too low");
    bool any = false;
    for (auto& b : witness) {
      b = rng.bernoulli(0.5) ? 1 : 0;
      any = any || b;
    }
    if (!any) continue;
    witness_w1 = eval_polynomial(w1_poly, witness);
    witness_w2 = eval_polynomial(w2_poly, witness);
    if (witness_w2 >= 1) break;
  }

  const auto c1 = std::max<std::int64_t>(
      narrow_i64(witness_w1), round_half_up(p.tightness1 * static_cast<double>(w1.total)));
  const auto c2 = std::clamp<std::int64_t>(
      round_half_up(p.tightness2 * static_cast<double>(w2.total)), 1,
      narrow_i64(witness_w2));

  std::vector<Constraint> constraints;
  constraints.push_back(make_constraint(w1_poly, {}, c1, Sense::LE));
  constraints.push_back(make_constraint(w2_poly, {}, c2, Sense::GE));

  ProblemInstance inst =
      make_instance(p.n, std::move(obj_poly), {}, std::move(constraints));

  char id[64];
  std::snprintf(id, sizeof(id), "quad_n%04d_s%llu", p.n,
                static_cast<unsigned long long>(p.seed));
  inst.id = id;
  Json meta;
  meta["id"] = inst.id;
  meta["generator"] = Json{{"n", p.n},
                           {"seed", p.seed},
                           {"coeff_lo", p.coeff_lo},
                           {"coeff_hi", p.coeff_hi},
                           {"density", p.density},
                           {"tightness", Json::array({p.tightness1, p.tightness2})}};
  meta["witness"] = witness;
  meta["caps"] = Json::array({c1, c2});
  inst.meta_json = meta.dump();
  return inst;
}

namespace {

RunRecord run_cbqs(const ProblemInstance& inst, const RunConfig& cfg,
                   std::uint64_t seed) {
  SearchConfig sc = cfg.search;
  sc.seed = seed;
  if (sc.M <= 0) sc.M = budget_m(inst.n);
  Rng rng(seed);
  const SearchTrace trace = qmaxsearch_two_stage(inst, sc, rng);

  RunRecord rec;
  rec.oracle_calls = trace.m_tot;
  rec.feasible = trace.found_feasible;
  rec.final_value = trace.best_value.str();
  for (const Incumbent& inc : trace.incumbents) {
    rec.timeline.push_back({"oracle_calls", static_cast<double>(inc.m_tot),
                            inc.value.str(), inc.stage == 2, inc.stage});
  }
  const ResourceModel model = ResourceModel::for_instance(inst, cfg.gate_time_ns);
  rec.kappa = model.kappa;
  rec.cycles_per_iteration = model.cycles_per_grover_iteration;
  rec.seconds_per_call = runtime_seconds(1, model);
  rec.est_seconds = runtime_seconds(trace.m_tot, model);
  return rec;
}

RunRecord run_grover(const ProblemInstance& inst, const RunConfig& cfg,
                     std::uint64_t seed) {
  RunRecord rec;
  const BruteForceResult opt = brute_force(inst, cfg.brute_cap);
  if (!opt.feasible) throw std::runtime_error("instance is infeasible");
  const std::uint64_t good = count_feasible_optimal(inst, opt.objective, cfg.brute_cap);
  Rng rng(seed);
  const double calls =
      grover_baseline_calls(inst.n, good, cfg.grover_trials, rng, cfg.search.d);
  rec.oracle_calls = static_cast<std::int64_t>(std::llround(calls));
  rec.feasible = true;
  rec.final_value = opt.objective.str();
  rec.timeline.push_back({"oracle_calls", calls, rec.final_value, true, 0});
  return rec;
}

RunRecord run_sa(const ProblemInstance& inst, const RunConfig& cfg,
                 std::uint64_t seed) {
  Rng rng(seed);
  const SAResult res = simulated_annealing(inst, cfg.sa, rng);
  RunRecord rec;
  rec.feasible = res.feasible;
  rec.final_value = res.objective.str();
  for (const auto& [step, value] : res.timeline) {
    rec.timeline.push_back(
        {"steps", static_cast<double>(step), value.str(), true, 0});
  }
  if (cfg.measure_walltime) rec.wall_seconds = res.wall_seconds;
  return rec;
}

RunRecord run_brute(const ProblemInstance& inst, const RunConfig& cfg) {
  const BruteForceResult res = brute_force(inst, cfg.brute_cap);
  RunRecord rec;
  rec.feasible = res.feasible;
  rec.final_value = res.feasible ? res.objective.str() : std::string("");
  rec.timeline.push_back({"steps", std::ldexp(1.0, inst.n), rec.final_value,
                          res.feasible, 0});
  return rec;
}

RunRecord run_qbnb(const ProblemInstance& inst, const RunConfig& cfg) {
  const auto it = cfg.qbnb_nodes.find(inst.id);
  if (it == cfg.qbnb_nodes.end())
    throw std::runtime_error("no tree-node count supplied for instance " + inst.id);
  RunRecord rec;
  const double calls = qbnb_oracle_calls(inst.n, it->second);
  rec.oracle_calls = static_cast<std::int64_t>(std::llround(calls));
  rec.feasible = true;
  if (inst.n <= cfg.brute_cap) {
    const BruteForceResult opt = brute_force(inst, cfg.brute_cap);
    if (opt.feasible) rec.final_value = opt.objective.str();
  }
  rec.timeline.push_back({"oracle_calls", calls, rec.final_value, true, 0});
  return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const std::vector<ProblemInstance>& instances,
                                      const RunConfig& cfg) {
  if (cfg.methods.empty())
    throw std::invalid_argument("run_experiment: no methods selected");
  for (const auto& m : cfg.methods) {
    if (m != "cbqs" && m != "grover" && m != "sa" && m != "brute" && m != "qbnb")
      throw std::invalid_argument("run_experiment: unknown method " + m);
  }
  if (cfg.seeds < 1) throw std::invalid_argument("run_experiment: seeds must be >= 1");

  struct Cell {
    std::size_t inst;
    std::size_t method;
    std::int32_t seed_idx;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
      for (std::int32_t s = 0; s < cfg.seeds; ++s) cells.push_back({i, m, s});

  std::vector<RunRecord> records(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const ProblemInstance& inst = instances[cell.inst];
    const std::string& method = cfg.methods[cell.method];
    const std::uint64_t seed =
        mix_seed(cfg.master_seed, (static_cast<std::uint64_t>(cell.inst) << 8) + cell.method,
                 static_cast<std::uint64_t>(cell.seed_idx));
    RunRecord rec;
    try {
      if (method == "cbqs") {
        rec = run_cbqs(inst, cfg, seed);
      } else if (method == "grover") {
        rec = run_grover(inst, cfg, seed);
      } else if (method == "sa") {
        rec = run_sa(inst, cfg, seed);
      } else if (method == "brute") {
        rec = run_brute(inst, cfg);
      } else {
        rec = run_qbnb(inst, cfg);
      }
    } catch (const std::exception& e) {
      rec = RunRecord{};
      rec.error = e.what();
    }
    rec.instance_id = inst.id;
    rec.n = inst.n;
    rec.method = method;
    rec.seed = seed;
    records[c] = std::move(rec);
  }
  return records;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::string out = "instance_id,n,method,axis,step_cost,value,feasible\n";
  for (const RunRecord& rec : records) {
    for (const TimelinePoint& tp : rec.timeline) {
      out += rec.instance_id;
      out += ',';
      out += std::to_string(rec.n);
      out += ',';
      out += rec.method;
      out += ',';
      out += tp.axis;
      out += ',';
      out += format_double(tp.cost);
      out += ',';
      out += tp.value;
      out += ',';
      out += tp.feasible ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

namespace {

Json record_to_json(const RunRecord& rec) {
  Json j;
  j["instance_id"] = rec.instance_id;
  j["n"] = rec.n;
  j["method"] = rec.method;
  j["seed"] = rec.seed;
  Json timeline = Json::array();
  for (const TimelinePoint& tp : rec.timeline) {
    timeline.push_back(Json{{"axis", tp.axis},
                            {"cost", tp.cost},
                            {"value", tp.value},
                            {"feasible", tp.feasible},
                            {"stage", tp.stage}});
  }
  j["timeline"] = std::move(timeline);
  j["final_value"] = rec.final_value;
  j["feasible"] = rec.feasible;
  j["error"] = rec.error;
  j["oracle_calls"] = rec.oracle_calls;
  j["kappa"] = rec.kappa;
  j["cycles_per_iteration"] = rec.cycles_per_iteration;
  j["seconds_per_call"] = rec.seconds_per_call;
  j["est_seconds"] = rec.est_seconds;
  j["wall_seconds"] = rec.wall_seconds;
  return j;
}

RunRecord record_from_json(const Json& j) {
  RunRecord rec;
  rec.instance_id = j.at("instance_id").get<std::string>();
  rec.n = j.at("n").get<std::int32_t>();
  rec.method = j.at("method").get<std::string>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& tj : j.at("timeline")) {
    TimelinePoint tp;
    tp.axis = tj.at("axis").get<std::string>();
    tp.cost = tj.at("cost").get<double>();
    tp.value = tj.at("value").get<std::string>();
    tp.feasible = tj.at("feasible").get<bool>();
    tp.stage = tj.at("stage").get<int>();
    rec.timeline.push_back(std::move(tp));
  }
  rec.final_value = j.at("final_value").get<std::string>();
  rec.feasible = j.at("feasible").get<bool>();
  rec.error = j.at("error").get<std::string>();
  rec.oracle_calls = j.at("oracle_calls").get<std::int64_t>();
  rec.kappa = j.at("kappa").get<std::int32_t>();
  rec.cycles_per_iteration = j.at("cycles_per_iteration").get<std::int64_t>();
  rec.seconds_per_call = j.at("seconds_per_call").get<double>();
  rec.est_seconds = j.at("est_seconds").get<double>();
  rec.wall_seconds = j.at("wall_seconds").get<double>();
  return rec;
}

}  // namespace

std::string records_to_json(const std::vector<RunRecord>& records) {
  Json j;
  Json arr = Json::array();
  for (const RunRecord& rec : records) arr.push_back(record_to_json(rec));
  j["records"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::vector<RunRecord> records_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("report: invalid JSON: ") + e.what());
  }
  std::vector<RunRecord> records;
  try {
    for (const auto& rj : j.at("records")) records.push_back(record_from_json(rj));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("report: malformed document: ") + e.what());
  }
  return records;
}

void write_report(const std::vector<RunRecord>& records, ReportFormat format,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << (format == ReportFormat::Csv ? records_to_csv(records)
                                      : records_to_json(records));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<RunRecord> load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return records_from_json(ss.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(e.what()) + " (" + path + ")");
  }
}

std::string pivot_fig1_csv(const std::vector<RunRecord>& records) {
  struct Agg {
    std::int64_t runs = 0;
    std::int64_t feasible = 0;
    double cost_sum = 0.0;
    double value_sum = 0.0;
    std::int64_t value_count = 0;
  };
  std::map<std::pair<std::int32_t, std::string>, Agg> groups;
  for (const RunRecord& rec : records) {
    if (!rec.error.empty()) continue;
    Agg& a = groups[{rec.n, rec.method}];
    a.runs += 1;
    if (rec.feasible) a.feasible += 1;
    if (!rec.timeline.empty()) a.cost_sum += rec.timeline.back().cost;
    if (!rec.final_value.empty()) {
      a.value_sum += BigInt(rec.final_value).convert_to<double>();
      a.value_count += 1;
    }
  }
  std::string out = "n,method,runs,mean_cost_to_final,mean_final_value,feasible_rate\n";
  for (const auto& [key, a] : groups) {
    out += std::to_string(key.first);
    out += ',';
    out += key.second;
    out += ',';
    out += std::to_string(a.runs);
    out += ',';
    out += format_double(a.runs ? a.cost_sum / static_cast<double>(a.runs) : 0.0);
    out += ',';
    out += format_double(a.value_count ? a.value_sum / static_cast<double>(a.value_count) : 0.0);
    out += ',';
    out += format_double(a.runs ? static_cast<double>(a.feasible) / static_cast<double>(a.runs) : 0.0);
    out += '\n';
  }
  return out;
}

std::string pivot_incumbents_csv(const std::vector<RunRecord>& records) {
  std::string out = "instance_id,n,method,seed,stage,axis,cost,value,feasible\n";
  const auto emit = [&out](const RunRecord& rec, const TimelinePoint& tp,
                           const std::string& axis, double cost) {
    out += rec.instance_id;
    out += ',';
    out += std::to_string(rec.n);
    out += ',';
    out += rec.method;
    out += ',';
    out += std::to_string(rec.seed);
    out += ',';
    out += std::to_string(tp.stage);
    out += ',';
    out += axis;
    out += ',';
    out += format_double(cost);
    out += ',';
    out += tp.value;
    out += ',';
    out += tp.feasible ? '1' : '0';
    out += '\n';
  };
  for (const RunRecord& rec : records) {
    for (const TimelinePoint& tp : rec.timeline) {
      emit(rec, tp, tp.axis, tp.cost);
      if (rec.method == "cbqs" && tp.axis == "oracle_calls")
        emit(rec, tp, "seconds", tp.cost * rec.seconds_per_call);
    }
  }
  return out;
}

}  // namespace cbqs
