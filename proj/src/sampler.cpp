#include "cbqs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbqs {

namespace {

bool bit_at(const Assignment& bits, std::int32_t var) {
  return bits[static_cast<std::size_t>(var - 1)] != 0;
}

}  // namespace

BiasProfile BiasProfile::toward(std::int32_t n, const Assignment& target) {
  if (target.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("bias: target length mismatch");
  BiasProfile b;
  b.n = n;
  b.target = target;
  b.p_one.resize(static_cast<std::size_t>(n));
  // sin^2(theta/2) of the two rotation angles:
  //   theta_0 = 2 arccos sqrt((n+4)/(n+8))  ->  P(1) = 4/(n+8)
  //   theta_1 = 2 arccos sqrt(4/(n+8))      ->  P(1) = (n+4)/(n+8)
  const double toward_one = static_cast<double>(n + 4) / (n + 8);
  const double toward_zero = 4.0 / (n + 8);
  for (std::int32_t j = 0; j < n; ++j)
    b.p_one[j] = target[j] ? toward_one : toward_zero;
  return b;
}

BiasProfile BiasProfile::toward_zero(std::int32_t n) {
  return toward(n, Assignment(static_cast<std::size_t>(n), 0));
}

BiasProfile BiasProfile::with_probabilities(std::vector<double> p_one) {
  BiasProfile b;
  b.n = static_cast<std::int32_t>(p_one.size());
  b.p_one = std::move(p_one);
  b.target.resize(b.p_one.size());
  for (std::size_t j = 0; j < b.p_one.size(); ++j) {
    if (!(b.p_one[j] > 0.0 && b.p_one[j] < 1.0))
      throw std::invalid_argument("bias: probabilities must lie in (0, 1)");
    b.target[j] = b.p_one[j] >= 0.5 ? 1 : 0;
  }
  return b;
}

Wide q_plus(const ProblemInstance& inst, std::size_t k, std::int32_t t1,
            const Assignment& bits) {
  const Constraint& c = inst.constraints.at(k);
  Wide sum = 0;
  for (const Term& t : c.poly.terms) {
    if (t.coeff < 0 || t.vars.back() != t1) continue;
    bool open = false;
    for (std::int32_t v : t.vars) {
      if (v != t1 && !bit_at(bits, v)) {
        open = true;
        break;
      }
    }
    if (!open) sum = checked_add(sum, t.coeff);
  }
  return sum;
}

Wide q_minus(const ProblemInstance& inst, std::size_t k, std::int32_t t1,
             const Assignment& bits) {
  const Constraint& c = inst.constraints.at(k);
  Wide sum = 0;
  for (const Term& t : c.poly.terms) {
    if (t.coeff >= 0) continue;
    if (!std::binary_search(t.vars.begin(), t.vars.end(), t1)) continue;
    bool open = false;
    for (std::int32_t v : t.vars) {
      if (v >= t1) break;  // sorted; later members contribute no factor
      if (!bit_at(bits, v)) {
        open = true;
        break;
      }
    }
    if (!open) sum = checked_add(sum, -Wide(t.coeff));
  }
  return sum;
}

BigInt product_lb(const ProductTerm& term, const Assignment& bits,
                  std::int32_t assigned, const BigInt& g, LbMode mode,
                  bool exact_remaining) {
  BigInt all_prod = 1;
  int neg_count = 0;
  std::int64_t max_neg = INT64_MIN;  // negative base closest to zero
  for (const ProductFactor& b : term.bases) {
    if (b.vars.back() <= assigned) continue;  // fully assigned, not remaining
    if (exact_remaining) {
      bool zero_member = false;
      for (std::int32_t v : b.vars) {
        if (v > assigned) break;
        if (!bit_at(bits, v)) {
          zero_member = true;
          break;
        }
      }
      if (zero_member) continue;
    }
    all_prod *= b.base;
    if (b.base < 0) {
      ++neg_count;
      max_neg = std::max(max_neg, b.base);
    }
  }

  if (mode == LbMode::Simple) {
    if (neg_count == 0) return g < 0 ? all_prod : BigInt(1);
    return neg_count % 2 == 0 ? all_prod : all_prod / max_neg;
  }
  // Tight: the parity rule follows the sign in front of the product,
  // alpha * g, so the result is the minimum over all exponent choices.
  const bool front_negative = (term.alpha < 0) != (g < 0);
  if (front_negative)  // maximize the product
    return neg_count % 2 == 0 ? all_prod : all_prod / max_neg;
  if (neg_count == 0) return BigInt(1);  // minimize: empty choice
  return neg_count % 2 == 1 ? all_prod : all_prod / max_neg;
}

Sampler::Sampler(const ProblemInstance& inst, SamplerOptions opts)
    : inst_(&inst), opts_(opts) {
  const auto n = static_cast<std::size_t>(inst.n);
  constraints_.resize(inst.constraints.size());
  for (std::size_t k = 0; k < inst.constraints.size(); ++k) {
    const Constraint& c = inst.constraints[k];
    CompiledConstraint& cc = constraints_[k];
    cc.pos_by_max.resize(n + 1);
    cc.neg_by_member.resize(n + 1);
    for (const Term& t : c.poly.terms) {
      if (t.coeff > 0) {
        PosEntry e;
        e.w_abs = t.coeff;
        e.others.assign(t.vars.begin(), t.vars.end() - 1);
        cc.pos_by_max[static_cast<std::size_t>(t.vars.back())].push_back(std::move(e));
      } else {
        for (std::size_t a = 0; a < t.vars.size(); ++a) {
          NegEntry e;
          e.w_abs = -t.coeff;
          e.prefix.assign(t.vars.begin(), t.vars.begin() + static_cast<std::ptrdiff_t>(a));
          cc.neg_by_member[static_cast<std::size_t>(t.vars[a])].push_back(std::move(e));
        }
      }
    }
    cc.term_begin = terms_.size();
    for (const ProductTerm& p : c.products) {
      FlatTerm ft;
      ft.alpha = p.alpha;
      ft.constraint = k;
      ft.src = &p;
      ft.base_begin = bases_.size();
      for (const ProductFactor& b : p.bases) {
        FlatBase fb;
        fb.vars = b.vars;
        fb.max_var = b.vars.back();
        fb.w = b.base;
        fb.term = terms_.size();
        bases_.push_back(std::move(fb));
      }
      ft.base_end = bases_.size();
      terms_.push_back(std::move(ft));
    }
    cc.term_end = terms_.size();
  }
  bases_by_var_.resize(n + 1);
  for (std::size_t b = 0; b < bases_.size(); ++b) {
    for (std::int32_t v : bases_[b].vars)
      bases_by_var_[static_cast<std::size_t>(v)].push_back(b);
  }
  has_products_ = !bases_.empty();
}

SampleState Sampler::initial_state() const {
  SampleState s;
  s.bits.assign(static_cast<std::size_t>(inst_->n), 0);
  s.caps.reserve(inst_->constraints.size());
  for (std::size_t k = 0; k < inst_->constraints.size(); ++k)
    s.caps.push_back(checked_add(inst_->constraints[k].cap, inst_->shifts[k]));
  s.g.assign(terms_.size(), BigInt(1));
  s.base_alive.assign(bases_.size(), 1);
  return s;
}

Wide Sampler::q_plus_at(std::size_t k, std::int32_t t1, const Assignment& bits) const {
  Wide sum = 0;
  for (const PosEntry& e : constraints_[k].pos_by_max[static_cast<std::size_t>(t1)]) {
    bool open = false;
    for (std::int32_t v : e.others) {
      if (!bit_at(bits, v)) {
        open = true;
        break;
      }
    }
    if (!open) sum = checked_add(sum, e.w_abs);
  }
  return sum;
}

Wide Sampler::q_minus_at(std::size_t k, std::int32_t t1, const Assignment& bits) const {
  Wide sum = 0;
  for (const NegEntry& e : constraints_[k].neg_by_member[static_cast<std::size_t>(t1)]) {
    bool open = false;
    for (std::int32_t v : e.prefix) {
      if (!bit_at(bits, v)) {
        open = true;
        break;
      }
    }
    if (!open) sum = checked_add(sum, e.w_abs);
  }
  return sum;
}

bool Sampler::product_side_ok(const SampleState& s, std::int32_t t1, int bit) const {
  Assignment child = s.bits;
  child[static_cast<std::size_t>(t1 - 1)] = static_cast<std::uint8_t>(bit);
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    const CompiledConstraint& cc = constraints_[k];
    if (cc.term_begin == cc.term_end) continue;
    BigInt lhs = 0;
    for (std::size_t ti = cc.term_begin; ti < cc.term_end; ++ti) {
      BigInt g2 = s.g[ti];
      if (bit == 1) {
        for (std::size_t b = terms_[ti].base_begin; b < terms_[ti].base_end; ++b) {
          if (s.base_alive[b] && bases_[b].max_var == t1) g2 *= bases_[b].w;
        }
      }
      const BigInt lb = product_lb(*terms_[ti].src, child, t1, g2, opts_.lb_mode,
                                   opts_.exact_product_check);
      lhs += terms_[ti].alpha * g2 * lb;
    }
    if (lhs > to_big(s.caps[k])) return false;
  }
  return true;
}

Sampler::Flags Sampler::eval_branch(const SampleState& s) const {
  Flags f;
  f.b_plus = f.b_minus = true;
  const std::int32_t t1 = s.t + 1;
  const std::size_t m = constraints_.size();
  f.qp.resize(m);
  f.qm.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    f.qp[k] = q_plus_at(k, t1, s.bits);
    f.qm[k] = q_minus_at(k, t1, s.bits);
    if (f.qp[k] > s.caps[k]) f.b_plus = false;
    if (f.qm[k] > s.caps[k]) f.b_minus = false;
  }
  if (has_products_) {
    if (f.b_plus) f.b_plus = product_side_ok(s, t1, 1);
    if (f.b_minus) f.b_minus = product_side_ok(s, t1, 0);
  }
  return f;
}

std::pair<bool, bool> Sampler::branch_flags(const SampleState& s) const {
  const Flags f = eval_branch(s);
  return {f.b_plus, f.b_minus};
}

void Sampler::update_fixed_products(SampleState& s, std::int32_t t1, int bit) const {
  for (std::size_t b : bases_by_var_[static_cast<std::size_t>(t1)]) {
    if (!s.base_alive[b]) continue;
    if (bit == 0) {
      s.base_alive[b] = 0;  // closes with exponent 0: multiply by 1
    } else if (bases_[b].max_var == t1) {
      s.base_alive[b] = 0;  // all members assigned 1
      s.g[bases_[b].term] *= bases_[b].w;
    }
  }
}

void Sampler::apply_bit(SampleState& s, int bit, const Flags& f) const {
  const std::int32_t t1 = s.t + 1;
  const auto& q = bit ? f.qp : f.qm;
  for (std::size_t k = 0; k < s.caps.size(); ++k)
    s.caps[k] = checked_sub(s.caps[k], q[k]);
  if (has_products_) update_fixed_products(s, t1, bit);
  s.bits[static_cast<std::size_t>(t1 - 1)] = static_cast<std::uint8_t>(bit);
  s.t = t1;
}

void Sampler::step(SampleState& s, const BiasProfile& bias, Rng& rng) const {
  if (s.t >= inst_->n) return;
  if (s.dead) {  // bit stays 0; capacities and fixed products untouched
    s.t += 1;
    return;
  }
  const Flags f = eval_branch(s);
  if (f.b_plus && f.b_minus) {
    const double p = bias.p_one[static_cast<std::size_t>(s.t)];
    const int bit = rng.bernoulli(p) ? 1 : 0;
    s.logprob += std::log(bit ? p : 1.0 - p);
    apply_bit(s, bit, f);
  } else if (f.b_plus) {
    apply_bit(s, 1, f);
  } else if (f.b_minus) {
    apply_bit(s, 0, f);
  } else {
    s.dead = true;
    s.t += 1;
  }
}

Sample Sampler::finish(const SampleState& s) const {
  if (s.t != inst_->n)
    throw std::invalid_argument("finish: state is not complete");
  Sample out;
  out.x = s.bits;
  out.dead = s.dead;
  out.logprob = s.logprob;
  out.objective = eval_objective(*inst_, out.x);
  if (!s.dead) {
    out.caps.reserve(s.caps.size());
    for (std::size_t k = 0; k < s.caps.size(); ++k) {
      BigInt cap = to_big(s.caps[k]);
      for (std::size_t ti = constraints_[k].term_begin; ti < constraints_[k].term_end; ++ti)
        cap -= terms_[ti].alpha * s.g[ti];
      out.caps.push_back(std::move(cap));
    }
  } else {
    // Registers froze at the dead step; report the capacities of the
    // zero-completed assignment instead so feasibility reads truthfully.
    out.caps = remaining_capacities(*inst_, out.x);
  }
  out.violation = 0;
  for (const BigInt& cap : out.caps)
    if (cap < 0) out.violation += cap;
  return out;
}

Sample Sampler::sample(const BiasProfile& bias, Rng& rng) const {
  SampleState s = initial_state();
  while (s.t < inst_->n) step(s, bias, rng);
  return finish(s);
}

void Sampler::walk_rec(SampleState& s, double prob, const BiasProfile& bias,
                       const std::function<void(const Node&)>& visit) const {
  if (s.t == inst_->n) {
    visit(Node{s, 0, false, false, Action::Leaf, prob});
    return;
  }
  const Flags f = eval_branch(s);
  const std::int32_t t1 = s.t + 1;
  Action action;
  if (f.b_plus && f.b_minus) {
    action = Action::Random;
  } else if (f.b_plus) {
    action = Action::ForcedOne;
  } else if (f.b_minus) {
    action = Action::ForcedZero;
  } else {
    action = Action::Dead;
  }
  visit(Node{s, t1, f.b_plus, f.b_minus, action, prob});
  switch (action) {
    case Action::Random: {
      const double p = bias.p_one[static_cast<std::size_t>(s.t)];
      SampleState zero_child = s;
      apply_bit(zero_child, 0, f);
      zero_child.logprob += std::log(1.0 - p);
      walk_rec(zero_child, prob * (1.0 - p), bias, visit);
      apply_bit(s, 1, f);
      s.logprob += std::log(p);
      walk_rec(s, prob * p, bias, visit);
      break;
    }
    case Action::ForcedOne:
      apply_bit(s, 1, f);
      walk_rec(s, prob, bias, visit);
      break;
    case Action::ForcedZero:
      apply_bit(s, 0, f);
      walk_rec(s, prob, bias, visit);
      break;
    default:
      s.dead = true;
      s.t = inst_->n;  // trailing bits remain 0; registers untouched
      walk_rec(s, prob, bias, visit);
      break;
  }
}

void Sampler::walk_tree(const BiasProfile& bias,
                        const std::function<void(const Node&)>& visit,
                        std::int32_t max_n) const {
  if (inst_->n > max_n)
    throw std::invalid_argument("walk_tree: n exceeds the exact-expansion cap");
  SampleState s = initial_state();
  walk_rec(s, 1.0, bias, visit);
}

std::vector<Sampler::WeightedSample> Sampler::enumerate(const BiasProfile& bias,
                                                        std::int32_t max_n) const {
  std::vector<WeightedSample> out;
  walk_tree(
      bias,
      [&](const Node& node) {
        if (node.action == Action::Leaf)
          out.push_back({finish(node.state), node.path_prob});
      },
      max_n);
  return out;
}

std::map<Assignment, double> exact_support(const ProblemInstance& inst,
                                           const BiasProfile& bias,
                                           SamplerOptions opts,
                                           std::int32_t max_n) {
  Sampler sampler(inst, opts);
  std::map<Assignment, double> support;
  for (const auto& ws : sampler.enumerate(bias, max_n))
    support[ws.sample.x] += ws.prob;
  return support;
}

std::int64_t batch_count(const Sampler& sampler, const BiasProfile& bias,
                         const std::function<bool(const Sample&)>& pred,
                         std::int32_t n_total, std::uint64_t seed) {
  std::int64_t count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static)
  for (std::int32_t i = 0; i < n_total; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const Sample s = sampler.sample(bias, rng);
    if (pred(s)) ++count;
  }
  return count;
}

std::int64_t batch_count_serial(const Sampler& sampler, const BiasProfile& bias,
                                const std::function<bool(const Sample&)>& pred,
                                std::int32_t n_total, std::uint64_t seed) {
  std::int64_t count = 0;
  for (std::int32_t i = 0; i < n_total; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const Sample s = sampler.sample(bias, rng);
    if (pred(s)) ++count;
  }
  return count;
}

}  // namespace cbqs
