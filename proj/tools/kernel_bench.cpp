// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Both sides derive per-item seeds the same way, so the
// results must match exactly; the tool verifies that while it times them.

#include "cbqs/baselines.hpp"
#include "cbqs/bench.hpp"
#include "cbqs/sampler.hpp"

#include <chrono>
#include <cstring>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report_line(const char* name, double serial_s, double parallel_s, bool equal) {
  std::printf("%-24s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  results %s\n",
              name, serial_s, parallel_s, serial_s / parallel_s,
              equal ? "equal" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
#ifdef _OPENMP
  std::printf("OpenMP: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("OpenMP: not enabled in this build\n");
#endif

  bool all_equal = true;

  {
    cbqs::GeneratorParams gp;
    gp.n = quick ? 24 : 60;
    gp.seed = 7;
    const auto inst = cbqs::generate_instance(gp);
    const cbqs::Sampler sampler(inst);
    const auto bias = cbqs::BiasProfile::toward_zero(inst.n);
    const auto pred = [](const cbqs::Sample& s) { return s.violation == 0; };
    const std::int32_t n_est = quick ? 2000 : 20000;

    auto t0 = Clock::now();
    const auto serial = cbqs::batch_count_serial(sampler, bias, pred, n_est, 99);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = cbqs::batch_count(sampler, bias, pred, n_est, 99);
    const double tp = seconds_since(t0);
    all_equal = all_equal && serial == parallel;
    report_line("batch sampling", ts, tp, serial == parallel);
  }

  {
    cbqs::GeneratorParams gp;
    gp.n = quick ? 14 : 20;
    gp.seed = 11;
    const auto inst = cbqs::generate_instance(gp);

    auto t0 = Clock::now();
    const auto serial = cbqs::brute_force_serial(inst);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = cbqs::brute_force(inst);
    const double tp = seconds_since(t0);
    const bool equal = serial.feasible == parallel.feasible &&
                       serial.x == parallel.x && serial.objective == parallel.objective;
    all_equal = all_equal && equal;
    report_line("brute-force search", ts, tp, equal);
  }

  return all_equal ? 0 : 1;
}
