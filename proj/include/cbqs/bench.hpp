#pragma once

#include "cbqs/baselines.hpp"
#include "cbqs/problem.hpp"
#include "cbqs/search.hpp"

#include <map>
#include <string>
#include <vector>

namespace cbqs {

struct GeneratorParams {
  std::int32_t n = 10;
  std::uint64_t seed = 1;
  std::int64_t coeff_lo = 1;
  std::int64_t coeff_hi = 100;
  double density = 1.0;       // keep probability per quadratic pair
  double tightness1 = 0.5;    // LE cap placement
  double tightness2 = 0.5;    // GE cap placement
};

/// Random quadratic objective with one LE and one GE quadratic constraint.
/// Caps are placed around a recorded random witness so every emitted
/// instance is feasible, and the GE cap is at least 1 so the all-zeros
/// assignment starts infeasible.
ProblemInstance generate_instance(const GeneratorParams& params);

struct TimelinePoint {
  std::string axis;   // "oracle_calls" or "steps"
  double cost = 0.0;
  std::string value;  // exact integer as a decimal string
  bool feasible = false;
  int stage = 0;      // 1 violation stage, 2 objective stage, 0 n/a

  bool operator==(const TimelinePoint&) const = default;
};

struct RunRecord {
  std::string instance_id;
  std::int32_t n = 0;
  std::string method;
  std::uint64_t seed = 0;
  std::vector<TimelinePoint> timeline;
  std::string final_value;
  bool feasible = false;
  std::string error;
  // resource summary
  std::int64_t oracle_calls = 0;
  std::int32_t kappa = 0;
  std::int64_t cycles_per_iteration = 0;
  double seconds_per_call = 0.0;  // resource-model estimate
  double est_seconds = 0.0;
  double wall_seconds = 0.0;      // only populated when measurement is on

  bool operator==(const RunRecord&) const = default;
};

struct RunConfig {
  std::vector<std::string> methods;  // cbqs, grover, sa, brute, qbnb
  SearchConfig search;               // search.M == 0 derives budget_m(n)
  SAConfig sa;
  std::int32_t grover_trials = 100;
  std::int32_t brute_cap = 24;
  std::uint64_t master_seed = 1;
  std::int32_t seeds = 1;
  std::map<std::string, double> qbnb_nodes;  // instance id -> tree nodes T
  bool measure_walltime = false;
  double gate_time_ns = 6.5;
};

/// One record per (instance, method, seed) cell. Cells are independent and
/// scheduled across OpenMP workers; per-cell seeds are derived from the
/// master seed and the cell position, so the output is identical for any
/// thread count. Per-cell failures land in RunRecord::error.
std::vector<RunRecord> run_experiment(const std::vector<ProblemInstance>& instances,
                                      const RunConfig& cfg);

enum class ReportFormat { Csv, Json };

std::string records_to_csv(const std::vector<RunRecord>& records);
std::string records_to_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_json(const std::string& text);

void write_report(const std::vector<RunRecord>& records, ReportFormat format,
                  const std::string& path);
std::vector<RunRecord> load_report(const std::string& path);

/// Per (n, method): run count, mean cost of reaching the final value, mean
/// final value, feasibility rate.
std::string pivot_fig1_csv(const std::vector<RunRecord>& records);

/// Incumbent-over-cost rows; cbqs timelines additionally appear on an
/// estimated "seconds" axis via the record's resource summary.
std::string pivot_incumbents_csv(const std::vector<RunRecord>& records);

}  // namespace cbqs
