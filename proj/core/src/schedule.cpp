#include "subshift/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subshift/errors.hpp"

namespace subshift {

namespace {

const double kLog2Nine = std::log2(9.0);
const double kLog2EightNinths = std::log2(8.0 / 9.0);

std::string str(std::uint64_t v) { return std::to_string(v); }

void apply_override(StepParams& step, const StepOverride& o) {
  if (o.empty()) return;
  step.overridden = true;
  if (o.epsilon) step.epsilon = *o.epsilon;
  if (o.delta) step.delta = *o.delta;
  if (o.code_ordinal_max) step.codes.max_ordinal = *o.code_ordinal_max;
  if (o.horizon_cap) step.codes.horizon_cap = *o.horizon_cap;
  if (o.codes) step.codes.explicit_indices = *o.codes;
}

}  // namespace

ParamSchedule::ParamSchedule(std::uint32_t alphabet_size, std::uint64_t initial_multiplier,
                             ScheduleMode mode, std::map<std::uint64_t, std::uint64_t> jump_steps,
                             std::uint64_t steps, std::map<std::uint64_t, StepOverride> overrides)
    : alphabet_size_(alphabet_size),
      initial_multiplier_(initial_multiplier),
      mode_(mode),
      jump_steps_(std::move(jump_steps)),
      steps_(steps),
      overrides_(std::move(overrides)) {
  // K_M = 1 is implicit; accept it when spelled out.
  if (auto it = jump_steps_.find(initial_multiplier_); it != jump_steps_.end()) {
    if (it->second != 1) {
      throw ConfigError("jump step K_" + str(initial_multiplier_) + " must be 1, got " +
                        str(it->second));
    }
    jump_steps_.erase(it);
  }
  validate();
}

void ParamSchedule::validate() const {
  if (alphabet_size_ < 2) throw ConfigError("alphabet size N must be >= 2");
  if (initial_multiplier_ < 2) throw ConfigError("initial multiplier M must be >= 2");
  if (mode_ == ScheduleMode::strict) {
    if (initial_multiplier_ < kStrictMinMultiplier) {
      throw ConfigError("strict schedules need M >= " + str(kStrictMinMultiplier) + ", got " +
                        str(initial_multiplier_));
    }
    if (!overrides_.empty()) throw ConfigError("strict schedules do not accept overrides");
  }
  if (steps_ < 1) throw ConfigError("schedule must plan at least one step");
  std::uint64_t expected_m = initial_multiplier_ + 1;
  std::uint64_t prev_K = 1;
  for (const auto& [m, K] : jump_steps_) {
    if (m < initial_multiplier_) {
      throw ConfigError("jump step for m = " + str(m) + " below M = " + str(initial_multiplier_));
    }
    if (m != expected_m) throw ConfigError("missing jump step for m = " + str(expected_m));
    if (K <= prev_K) {
      throw ConfigError("jump steps must increase strictly: K_" + str(m) + " = " + str(K) +
                        " after " + str(prev_K));
    }
    if (K > steps_) {
      throw ConfigError("jump step K_" + str(m) + " = " + str(K) + " lies beyond the " +
                        str(steps_) + " planned steps");
    }
    prev_K = K;
    ++expected_m;
  }
  for (const auto& [k, o] : overrides_) {
    if (k > steps_) throw ConfigError("override for step " + str(k) + " beyond planned steps");
    if (o.epsilon && !(*o.epsilon > 0.0)) throw ConfigError("override epsilon must be > 0");
    if (o.delta && !(*o.delta >= 0.0)) throw ConfigError("override delta must be >= 0");
  }
}

std::uint64_t ParamSchedule::multiplier(std::uint64_t k) const {
  if (k < 1 || k > steps_) {
    throw ConfigError("step " + str(k) + " outside the schedule's planned steps [1, " +
                      str(steps_) + "]; its jump step is undefined");
  }
  std::uint64_t m = initial_multiplier_;
  for (const auto& [jm, K] : jump_steps_) {
    if (K <= k) m = jm;
  }
  return m;
}

std::uint64_t ParamSchedule::jump_step(std::uint64_t m) const {
  if (m == initial_multiplier_) return 1;
  auto it = jump_steps_.find(m);
  if (it == jump_steps_.end()) {
    throw ConfigError("no jump step defined for m = " + str(m));
  }
  return it->second;
}

Magnitude ParamSchedule::block_length(std::uint64_t k) const {
  if (k > steps_) multiplier(k);  // throws
  Magnitude n = Magnitude::exact(1);
  std::uint64_t m = initial_multiplier_;
  std::uint64_t seg_start = 1;
  auto mul_run = [&](std::uint64_t mult, std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) {
      if (!n.is_exact()) {
        n = Magnitude::from_log2(n.log2() + static_cast<double>(count - i) *
                                                std::log2(static_cast<double>(mult)));
        return;
      }
      n = n * Magnitude::exact(mult);
    }
  };
  for (const auto& [jm, K] : jump_steps_) {
    if (K > k) break;
    mul_run(m, K - seg_start);
    m = jm;
    seg_start = K;
  }
  if (k >= seg_start) mul_run(m, k - seg_start + 1);
  return n;
}

StepParams derive_step(const ParamSchedule& sched, std::uint64_t k) {
  StepParams s;
  s.k = k;
  s.m = sched.multiplier(k);
  const std::uint64_t M = sched.initial_multiplier();
  s.block_length = sched.block_length(k);
  s.reference = s.m - M;
  if (s.reference >= k) {
    throw ConfigError("reference step p = " + str(s.reference) + " not below k = " + str(k));
  }
  s.reference_length = sched.block_length(s.reference);
  s.reference_multiplier = sched.multiplier(s.reference + 1);
  s.epsilon = s.m == M ? 1.0 : 3.0 / static_cast<double>(s.m);
  s.delta = std::exp2(-static_cast<double>(s.reference_multiplier));
  s.alpha_log2 = alpha_log2(s.m, s.reference_length);
  s.codes.max_ordinal = s.m;
  s.codes.horizon_cap =
      std::exp2(s.reference_length.log2() - static_cast<double>(s.reference_multiplier));
  const auto& ov = sched.overrides();
  if (auto it = ov.find(0); it != ov.end()) apply_override(s, it->second);
  if (auto it = ov.find(k); it != ov.end()) apply_override(s, it->second);
  return s;
}

std::vector<SlidingBlockCode> step_codes(const StepParams& step, std::uint32_t alphabet_size) {
  if (step.codes.explicit_indices) {
    std::vector<SlidingBlockCode> out;
    auto idx = *step.codes.explicit_indices;
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (auto i : idx) out.push_back(code_from_index(i, alphabet_size));
    return out;
  }
  return eligible_codes(alphabet_size, step.codes.max_ordinal, step.codes.horizon_cap);
}

double alpha_log2(std::uint64_t m, const Magnitude& reference_length) {
  const double md = static_cast<double>(m);
  return 4.0 * std::log2(md) + 1.0 + 2.0 * md + 1.5 * (1.0 + reference_length.log2());
}

double condition_b_lhs_log2(std::uint64_t m, const Magnitude& reference_length, std::uint64_t K) {
  return kLog2Nine + alpha_log2(m, reference_length) +
         static_cast<double>(K - 1) * kLog2EightNinths;
}

std::uint64_t check_condition_b(std::uint64_t M, std::uint64_t m,
                                const Magnitude& reference_length) {
  if (m <= M) throw ArgumentError("condition (b) applies to m > M only");
  const long double rhs = -static_cast<long double>(m + 2);
  const long double x = (static_cast<long double>(kLog2Nine) + alpha_log2(m, reference_length) -
                         rhs) /
                        -static_cast<long double>(kLog2EightNinths);
  // (K - 1) > x
  auto K = static_cast<std::uint64_t>(std::floor(x)) + 2;
  auto holds = [&](std::uint64_t k) {
    return static_cast<long double>(condition_b_lhs_log2(m, reference_length, k)) < rhs;
  };
  while (K > 1 && holds(K - 1)) --K;
  while (!holds(K)) ++K;
  return K;
}

const char* to_string(ConditionAResult::Status s) {
  switch (s) {
    case ConditionAResult::Status::verified:
      return "verified";
    case ConditionAResult::Status::violated:
      return "violated";
    case ConditionAResult::Status::inconclusive:
      return "inconclusive";
    case ConditionAResult::Status::vacuous:
      return "vacuous";
  }
  return "?";
}

ConditionAResult check_condition_a(const ParamSchedule& sched, std::uint64_t m,
                                   const AperiodicSequence& y) {
  ConditionAResult res;
  res.m = m;
  const std::uint64_t M = sched.initial_multiplier();
  if (m <= M) {
    res.status = ConditionAResult::Status::vacuous;
    res.reason = "no jump at the initial multiplier";
    return res;
  }
  const std::uint64_t K = sched.jump_step(m);
  const StepParams step = derive_step(sched, K);
  const Magnitude n_p = step.reference_length;
  const Magnitude ratio = step.block_length / n_p;
  res.status = ConditionAResult::Status::inconclusive;
  if (!n_p.is_exact() || !ratio.is_exact()) {
    res.reason = "N_p or N_{K_m}/N_p = " + ratio.to_string() + " beyond any loadable prefix";
    return res;
  }
  res.ratio = *ratio.exact_value();
  const double eps = step.epsilon;
  if (!(eps > 0.0 && eps < 1.0)) {
    res.reason = "epsilon outside (0, 1)";
    return res;
  }
  const auto step_len = static_cast<std::size_t>(*n_p.exact_value());
  const std::uint64_t m2 = m * m;
  const auto L_max = static_cast<std::size_t>(*res.ratio);
  __extension__ typedef unsigned __int128 u128;
  const u128 need = static_cast<u128>(m2) * L_max * step_len + (step_len - 1);
  if (need > y.length()) {
    res.required_length = need > SIZE_MAX ? SIZE_MAX : static_cast<std::size_t>(need);
    res.reason = "prefix of length " + std::to_string(y.length()) + " too short; need " +
                 std::to_string(res.required_length);
    return res;
  }
  res.required_length = static_cast<std::size_t>(need);
  std::size_t witness = 0;
  for (std::size_t l = 0; l < step_len; ++l) {
    auto L = estimate_L_progression(y, step_len, l, eps, m2, L_max);
    if (!L) {
      res.status = ConditionAResult::Status::violated;
      res.failing_offset = l;
      res.reason = "threshold not reached within N_{K_m}/N_p along offset " + std::to_string(l);
      return res;
    }
    witness = std::max(witness, *L);
  }
  res.witness_L = witness;
  res.status = ConditionAResult::Status::verified;
  res.reason = "finite-horizon certificate on the loaded prefix";
  return res;
}

WChain hoeffding_W_chain(double epsilon, double v) {
  if (!(epsilon > 0.0 && epsilon < 2.0)) throw ArgumentError("W chain needs 0 < epsilon < 2");
  if (!(v > 0.0)) throw ArgumentError("W chain needs v > 0");
  const double half = 1.0 - epsilon / 2.0;
  WChain w{};
  w.W = std::pow(1.0 + 2.0 * epsilon / v, (v + 2.0 * epsilon) / (v + 4.0)) *
        std::pow(half, half * 4.0 / (v + 4.0));
  w.W1 = std::pow(1.0 + 2.0 * epsilon / v, epsilon / 2.0) * std::pow(0.5, 4.0 / (v + 4.0));
  w.W2 = 0.5 * std::pow(2.0 * epsilon, epsilon / 2.0) * std::pow(v, -epsilon / 2.0);
  w.W3 = 0.25 * std::pow(v, -epsilon / 2.0);
  return w;
}

Magnitude hoeffding_tail_bound(double epsilon, double v, std::uint64_t m) {
  if (!(epsilon > 0.0 && epsilon < 2.0)) throw ArgumentError("tail bound needs 0 < epsilon < 2");
  if (!(v > 0.0)) throw ArgumentError("tail bound needs v > 0");
  if (m < 1) throw ArgumentError("tail bound needs m >= 1");
  const double md = static_cast<double>(m);
  return Magnitude::from_log2(1.0 + 2.0 * md + (epsilon / 2.0) * md * std::log2(v));
}

GammaBound gamma_lower_bound(std::uint64_t k, std::uint64_t m, const Magnitude& reference_length) {
  if (k < 1) throw ArgumentError("gamma_lower_bound needs k >= 1");
  GammaBound g{};
  g.deficit_log2 = alpha_log2(m, reference_length) + static_cast<double>(k - 1) * kLog2EightNinths;
  g.value = 1.0 - std::exp2(g.deficit_log2);
  g.vacuous = !(g.value > 0.0);
  return g;
}

double final_corr_bound(std::uint64_t m, double epsilon, double delta) {
  if (m < 5) throw ArgumentError("final correlation bound needs m >= 5, got " + str(m));
  const double md = static_cast<double>(m);
  return 2.0 / (md - 2.0) + (md - 4.0) / (md - 2.0) * 2.0 * (epsilon + delta);
}

double entropy_floor(std::uint32_t alphabet_size, std::uint64_t initial_multiplier) {
  if (initial_multiplier < 2) throw ArgumentError("entropy floor needs M >= 2");
  return std::log(static_cast<double>(alphabet_size)) -
         std::log(2.0) / static_cast<double>(initial_multiplier - 1);
}

PlanReport make_plan(const ParamSchedule& sched, const AperiodicSequence* y) {
  PlanReport plan;
  plan.entropy_floor = entropy_floor(sched.alphabet_size(), sched.initial_multiplier());
  plan.rows.reserve(sched.steps());
  for (std::uint64_t k = 1; k <= sched.steps(); ++k) {
    PlanRow row;
    row.step = derive_step(sched, k);
    row.family_bound =
        row.step.codes.explicit_indices
            ? row.step.codes.explicit_indices->size()
            : eligible_code_count(sched.alphabet_size(), row.step.codes.max_ordinal,
                                  row.step.codes.horizon_cap);
    row.gamma_bound = gamma_lower_bound(k, row.step.m, row.step.reference_length);
    if (!row.step.block_length.is_exact()) plan.strict_infeasible = true;
    plan.rows.push_back(std::move(row));
  }
  plan.max_block_length = sched.block_length(sched.steps());
  const std::uint64_t M = sched.initial_multiplier();
  for (const auto& [m, K] : sched.jump_steps()) {
    JumpCheck jc;
    jc.m = m;
    jc.configured_K = K;
    jc.minimal_K = check_condition_b(M, m, sched.block_length(m - M));
    jc.b_satisfied = K >= jc.minimal_K;
    if (y != nullptr) {
      jc.a = check_condition_a(sched, m, *y);
    } else {
      jc.a.m = m;
      jc.a.status = ConditionAResult::Status::inconclusive;
      jc.a.reason = "no sequence loaded";
    }
    plan.jumps.push_back(std::move(jc));
  }
  return plan;
}

}  // namespace subshift
