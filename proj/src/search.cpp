#include "cbqs/search.hpp"

#include "cbqs/amplification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbqs {

namespace {

/// Per-run driver: one compiled sampler, the current bias, and (in exact
/// mode) the enumerated leaf distribution for that bias.
class Engine {
 public:
  Engine(const ProblemInstance& inst, const SearchConfig& cfg, BiasProfile bias)
      : inst_(inst), cfg_(cfg), sampler_(inst, cfg.sampler), bias_(std::move(bias)) {}

  void retarget(const Assignment& x) {
    bias_ = BiasProfile::toward(inst_.n, x);
    leaves_.reset();
  }

  QSearchResult run_qsearch(const SamplePredicate& marked,
                            const SamplePredicate& accept, std::int64_t budget,
                            Rng& rng) {
    QSearchResult res;
    if (budget <= 0) return res;
    const Prepared p = prepare(marked, rng);
    ExponentialSchedule sched(cfg_.d);
    while (true) {
      const std::int64_t m = sched.next_m();
      const std::int64_t j = rng.uniform_int(1, m);
      res.m_tot += 2 * j + 1 + (cfg_.count_state_prep ? 1 : 0);
      const bool ok = round_succeeds(p.a, j, rng);
      Sample s = draw(p, ok, marked, rng);
      res.rounds.push_back({m, j, ok});
      if (accept(s)) {
        res.sample = std::move(s);
        res.success = true;
        return res;
      }
      if (res.m_tot >= budget) {
        res.sample = std::move(s);
        return res;
      }
    }
  }

 private:
  struct Prepared {
    double a = 0.0;
    bool exact = false;
    std::vector<std::size_t> good, bad;  // leaf indexes
    std::vector<double> good_cum, bad_cum;
    double good_mass = 0.0, bad_mass = 0.0;
  };

  const std::vector<Sampler::WeightedSample>& leaves() {
    if (!leaves_) {
      if (inst_.n > cfg_.exact_cap)
        throw std::invalid_argument("exact amplitude refused: n exceeds the cap");
      leaves_ = sampler_.enumerate(bias_, cfg_.exact_cap);
    }
    return *leaves_;
  }

  Prepared prepare(const SamplePredicate& marked, Rng& rng) {
    Prepared p;
    p.exact = cfg_.amplitude_mode == AmplitudeMode::Exact;
    if (p.exact) {
      const auto& ls = leaves();
      for (std::size_t i = 0; i < ls.size(); ++i) {
        if (marked(ls[i].sample)) {
          p.good_mass += ls[i].prob;
          p.good.push_back(i);
          p.good_cum.push_back(p.good_mass);
        } else {
          p.bad_mass += ls[i].prob;
          p.bad.push_back(i);
          p.bad_cum.push_back(p.bad_mass);
        }
      }
      if (p.good.empty()) {
        p.a = 0.0;
      } else if (p.bad.empty()) {
        p.a = 1.0;
      } else {
        p.a = p.good_mass;
      }
    } else {
      const std::uint64_t batch_seed = rng.next_u64();
      const std::int64_t count = batch_count(sampler_, bias_, marked, cfg_.n_est, batch_seed);
      p.a = count > 0 ? static_cast<double>(count) / cfg_.n_est
                      : 1.0 / (4.0 * cfg_.n_est);
    }
    return p;
  }

  Sample draw(const Prepared& p, bool want_good, const SamplePredicate& marked,
              Rng& rng) {
    if (p.exact) {
      const auto& idx = want_good ? p.good : p.bad;
      const auto& cum = want_good ? p.good_cum : p.bad_cum;
      const double mass = want_good ? p.good_mass : p.bad_mass;
      if (idx.empty())
        throw std::logic_error("conditional draw from an empty leaf set");
      const double u = rng.next_double() * mass;
      const auto it = std::lower_bound(cum.begin(), cum.end(), u);
      const std::size_t pos =
          std::min(static_cast<std::size_t>(it - cum.begin()), idx.size() - 1);
      return (*leaves_)[idx[pos]].sample;
    }
    // Rejection sampling. The try cap bounds the cost of a round whose
    // empirical estimate overstated the good mass; on exhaustion the last
    // sample is returned and the caller's stopping test fails.
    const std::int64_t cap = want_good ? std::max<std::int64_t>(cfg_.n_est, 64) : 4096;
    Sample s;
    for (std::int64_t i = 0; i < cap; ++i) {
      s = sampler_.sample(bias_, rng);
      if (marked(s) == want_good) return s;
    }
    return s;
  }

  const ProblemInstance& inst_;
  const SearchConfig& cfg_;
  Sampler sampler_;
  BiasProfile bias_;
  std::optional<std::vector<Sampler::WeightedSample>> leaves_;
};

}  // namespace

double amplitude(const ProblemInstance& inst, const BiasProfile& bias,
                 const SamplePredicate& pred, const SearchConfig& cfg) {
  Sampler sampler(inst, cfg.sampler);
  if (cfg.amplitude_mode == AmplitudeMode::Exact) {
    if (inst.n > cfg.exact_cap)
      throw std::invalid_argument("exact amplitude refused: n exceeds the cap");
    double mass = 0.0;
    for (const auto& ws : sampler.enumerate(bias, cfg.exact_cap))
      if (pred(ws.sample)) mass += ws.prob;
    return mass;
  }
  if (cfg.n_est < 1) throw std::invalid_argument("amplitude: n_est must be >= 1");
  const std::int64_t count = batch_count(sampler, bias, pred, cfg.n_est, cfg.seed);
  return count > 0 ? static_cast<double>(count) / cfg.n_est
                   : 1.0 / (4.0 * cfg.n_est);
}

QSearchResult qsearch(const ProblemInstance& inst, const BiasProfile& bias,
                      const SamplePredicate& marked, const SearchConfig& cfg,
                      Rng& rng) {
  if (!(cfg.d > 1.0 && cfg.d < 2.0))
    throw std::invalid_argument("qsearch: d must lie in (1, 2)");
  Engine eng(inst, cfg, bias);
  const auto accept = [&marked](const Sample& s) {
    return marked(s) && s.violation == 0;
  };
  return eng.run_qsearch(marked, accept, cfg.M, rng);
}

QSearchViolationResult qsearch_violation(const ProblemInstance& inst,
                                         const BiasProfile& bias, const BigInt& T,
                                         const SearchConfig& cfg, Rng& rng) {
  if (T > 0) throw std::invalid_argument("qsearch_violation: T must be <= 0");
  Engine eng(inst, cfg, bias);
  const auto marked = [&T](const Sample& s) { return s.violation > T; };
  QSearchResult res = eng.run_qsearch(marked, marked, cfg.M, rng);
  QSearchViolationResult out;
  out.v = res.sample.violation;
  out.sample = std::move(res.sample);
  out.m_tot = res.m_tot;
  out.success = res.success;
  return out;
}

SearchTrace qmaxsearch(const ProblemInstance& inst, const SearchConfig& cfg,
                       Rng& rng) {
  if (!(cfg.d > 1.0 && cfg.d < 2.0))
    throw std::invalid_argument("qmaxsearch: d must lie in (1, 2)");
  Engine eng(inst, cfg, BiasProfile::toward_zero(inst.n));
  SearchTrace tr;
  tr.best.assign(static_cast<std::size_t>(inst.n), 0);
  tr.best_value = eval_objective(inst, tr.best);
  BigInt T = 0;
  while (true) {
    const std::int64_t budget = cfg.M - tr.m_tot;
    if (budget <= 0) break;
    const BigInt threshold = T;
    const auto marked = [&threshold](const Sample& s) {
      return s.objective > threshold;
    };
    const auto accept = [&threshold](const Sample& s) {
      return s.objective > threshold && s.violation == 0;
    };
    const QSearchResult res = eng.run_qsearch(marked, accept, budget, rng);
    tr.m_tot += res.m_tot;
    if (!res.success) break;
    T = res.sample.objective;
    tr.best = res.sample.x;
    tr.best_value = T;
    tr.found_feasible = true;
    tr.incumbents.push_back({tr.m_tot, T, tr.best, 2});
    if (cfg.retarget_bias) eng.retarget(tr.best);
  }
  return tr;
}

SearchTrace qmaxsearch_two_stage(const ProblemInstance& inst,
                                 const SearchConfig& cfg, Rng& rng) {
  if (!(cfg.d > 1.0 && cfg.d < 2.0))
    throw std::invalid_argument("qmaxsearch_two_stage: d must lie in (1, 2)");
  Engine eng(inst, cfg, BiasProfile::toward_zero(inst.n));
  SearchTrace tr;
  const Assignment zeros(static_cast<std::size_t>(inst.n), 0);
  tr.best = zeros;

  int stage;
  BigInt T_obj = 0;
  BigInt T_v = violation(inst, zeros);
  if (T_v == 0) {  // feasible start: skip the violation stage entirely
    stage = 2;
    tr.best_value = eval_objective(inst, zeros);
    tr.found_feasible = true;
  } else {
    stage = 1;
    tr.best_value = T_v;
  }

  while (true) {
    const std::int64_t budget = cfg.M - tr.m_tot;
    if (budget <= 0) break;
    if (stage == 1) {
      const BigInt threshold = T_v;
      const auto marked = [&threshold](const Sample& s) {
        return s.violation > threshold;
      };
      const QSearchResult res = eng.run_qsearch(marked, marked, budget, rng);
      tr.m_tot += res.m_tot;
      if (!res.success) break;  // budget spent without improving the violation
      if (res.sample.violation == 0) {
        stage = 2;
        tr.stage_marks.push_back(tr.m_tot);
        T_obj = res.sample.objective;
        tr.best = res.sample.x;
        tr.best_value = T_obj;
        tr.found_feasible = true;
        tr.incumbents.push_back({tr.m_tot, T_obj, tr.best, 2});
      } else {
        T_v = res.sample.violation;
        tr.best = res.sample.x;
        tr.best_value = T_v;
        tr.incumbents.push_back({tr.m_tot, T_v, tr.best, 1});
      }
      if (cfg.retarget_bias) eng.retarget(res.sample.x);
    } else {
      const BigInt threshold = T_obj;
      const auto marked = [&threshold](const Sample& s) {
        return s.objective > threshold;
      };
      const auto accept = [&threshold](const Sample& s) {
        return s.objective > threshold && s.violation == 0;
      };
      const QSearchResult res = eng.run_qsearch(marked, accept, budget, rng);
      tr.m_tot += res.m_tot;
      if (!res.success) break;
      T_obj = res.sample.objective;
      tr.best = res.sample.x;
      tr.best_value = T_obj;
      tr.found_feasible = true;
      tr.incumbents.push_back({tr.m_tot, T_obj, tr.best, 2});
      if (cfg.retarget_bias) eng.retarget(tr.best);
    }
  }
  return tr;
}

}  // namespace cbqs
