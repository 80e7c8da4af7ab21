#include "cbqs/resources.hpp"

#include "cbqs/amplification.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace cbqs {

namespace {

std::int64_t ceil_log2(std::int64_t v) {
  if (v <= 1) return 0;
  return std::bit_width(static_cast<std::uint64_t>(v - 1));
}

std::int64_t floor_log2(std::int64_t v) {
  return std::bit_width(static_cast<std::uint64_t>(v)) - 1;
}

}  // namespace

std::int64_t ca_cycles(std::int64_t t, std::int32_t kappa) {
  if (t < 0) throw std::invalid_argument("ca_cycles: negative adder count");
  if (kappa < 2) throw std::invalid_argument("ca_cycles: kappa must be >= 2");
  return t * (2 * ceil_log2(kappa) + 3);
}

std::int64_t ca2_cycles(std::int32_t kappa) {
  if (kappa < 4)
    throw std::invalid_argument("ca2_cycles: kappa must be >= 4");
  // Integer division is exact here: floor(log2(floor(x))) = floor(log2(x))
  // for x >= 1.
  return floor_log2(kappa) + floor_log2(kappa - 1) + floor_log2(kappa / 3) +
         floor_log2((kappa - 1) / 3) + 14;
}

std::int64_t constraint_check_cycles(std::int32_t n, std::int32_t kappa) {
  if (n < 0) throw std::invalid_argument("constraint_check_cycles: negative n");
  if (n == 0) return 0;
  return 2LL * n * (ca2_cycles(kappa) + 4LL * kappa + 1) + 2LL * n * ca_cycles(n, kappa);
}

std::int64_t objective_cycles(std::int32_t n, std::int32_t kappa) {
  if (n < 0) throw std::invalid_argument("objective_cycles: negative n");
  if (n == 0) return 0;
  return ca_cycles(static_cast<std::int64_t>(n) * (n + 1) / 2, kappa);
}

std::int32_t derive_kappa(const ProblemInstance& inst) {
  Wide max_cap = 0;
  for (std::size_t k = 0; k < inst.constraints.size(); ++k) {
    const Wide cap = checked_add(inst.constraints[k].cap, inst.shifts[k]);
    if (cap > max_cap) max_cap = cap;
  }
  std::int32_t kappa = 2;
  // 2^(kappa-1) > max_cap
  while (kappa < 126 && (Wide(1) << (kappa - 1)) <= max_cap) ++kappa;
  return kappa;
}

ResourceModel ResourceModel::make(std::int32_t n, std::int32_t kappa,
                                  double gate_time_ns) {
  if (kappa < 2) throw std::invalid_argument("resource model: kappa must be >= 2");
  if (gate_time_ns <= 0) throw std::invalid_argument("resource model: gate time must be positive");
  ResourceModel m;
  m.n = n;
  m.kappa = kappa;
  m.gate_time_ns = gate_time_ns;
  // One G and one G-dagger per Grover iterate, plus the threshold comparison
  // inside S_F. The paper publishes the component depths only; this
  // composition is the model's one assumption, kept in a single place.
  m.cycles_per_grover_iteration =
      2 * (constraint_check_cycles(n, kappa) + objective_cycles(n, kappa)) +
      ca2_cycles(std::max(kappa, 4));
  return m;
}

ResourceModel ResourceModel::for_instance(const ProblemInstance& inst,
                                          double gate_time_ns) {
  return make(inst.n, std::max(derive_kappa(inst), 4), gate_time_ns);
}

double runtime_seconds(std::int64_t oracle_calls, const ResourceModel& model) {
  if (oracle_calls < 0) throw std::invalid_argument("runtime: negative oracle calls");
  return static_cast<double>(oracle_calls) *
         static_cast<double>(model.cycles_per_grover_iteration) *
         model.gate_time_ns * 1e-9;
}

double qbnb_oracle_calls(std::int32_t n, double tree_nodes) {
  if (n < 1) throw std::invalid_argument("qbnb: n must be >= 1");
  if (tree_nodes < 2) throw std::invalid_argument("qbnb: tree nodes must be >= 2");
  const double inner = std::log2(n * std::log2(tree_nodes));
  return std::sqrt(n * tree_nodes) * n * inner * inner;
}

std::int64_t budget_m(std::int32_t n) {
  if (n < 0) throw std::invalid_argument("budget: negative n");
  const double q = static_cast<double>(n) / 4.0;
  return static_cast<std::int64_t>(std::floor(q * q + 0.5)) + 1200;
}

double grover_baseline_calls(std::int32_t n, std::uint64_t good_count,
                             std::int32_t trials, Rng& rng, double d) {
  if (n < 1 || n > 62) throw std::invalid_argument("grover baseline: n out of range");
  if (trials < 1) throw std::invalid_argument("grover baseline: trials must be >= 1");
  const std::uint64_t total = 1ULL << n;
  if (good_count == 0 || good_count > total)
    throw std::invalid_argument("grover baseline: good_count out of range");
  const double a = static_cast<double>(good_count) / static_cast<double>(total);
  const std::uint64_t base = rng.next_u64();
  std::int64_t sum = 0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
  for (std::int32_t i = 0; i < trials; ++i) {
    Rng r(mix_seed(base, static_cast<std::uint64_t>(i)));
    ExponentialSchedule sched(d);
    std::int64_t m_tot = 0;
    while (true) {
      const std::int64_t m = sched.next_m();
      const std::int64_t j = r.uniform_int(1, m);
      m_tot += 2 * j + 1;
      if (round_succeeds(a, j, r)) break;
    }
    sum += m_tot;
  }
  return static_cast<double>(sum) / static_cast<double>(trials);
}

}  // namespace cbqs
