#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subshift/codes.hpp"
#include "subshift/magnitude.hpp"
#include "subshift/sequences.hpp"

namespace subshift {

enum class ScheduleMode { strict, relaxed };

// Per-step parameter overrides; relaxed schedules only.
struct StepOverride {
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::vector<std::uint64_t>> codes;  // explicit enumeration indices
  std::optional<std::uint64_t> code_ordinal_max;
  std::optional<double> horizon_cap;

  bool empty() const {
    return !epsilon && !delta && !codes && !code_ordinal_max && !horizon_cap;
  }
};

// The step -> multiplier assignment and the parameters derived from it.
//
// jump_steps maps each multiplier m > M to the first step K_m using it; the
// multiplier M starts at step 1. `steps` is the number of planned
// construction steps. Overrides are keyed by step, with key 0 applying to
// every step before the step-specific entry.
class ParamSchedule {
 public:
  ParamSchedule(std::uint32_t alphabet_size, std::uint64_t initial_multiplier, ScheduleMode mode,
                std::map<std::uint64_t, std::uint64_t> jump_steps, std::uint64_t steps,
                std::map<std::uint64_t, StepOverride> overrides = {});

  std::uint32_t alphabet_size() const { return alphabet_size_; }
  std::uint64_t initial_multiplier() const { return initial_multiplier_; }
  ScheduleMode mode() const { return mode_; }
  const std::map<std::uint64_t, std::uint64_t>& jump_steps() const { return jump_steps_; }
  const std::map<std::uint64_t, StepOverride>& overrides() const { return overrides_; }
  std::uint64_t steps() const { return steps_; }

  // m_k for 1 <= k <= steps().
  std::uint64_t multiplier(std::uint64_t k) const;
  // K_m; throws ConfigError when m is never reached.
  std::uint64_t jump_step(std::uint64_t m) const;
  // N_k = m_1 * ... * m_k (N_0 = 1), exact while it fits.
  Magnitude block_length(std::uint64_t k) const;
  // Largest multiplier reached within the planned steps.
  std::uint64_t final_multiplier() const { return multiplier(steps_); }

 private:
  void validate() const;

  std::uint32_t alphabet_size_;
  std::uint64_t initial_multiplier_;
  ScheduleMode mode_;
  std::map<std::uint64_t, std::uint64_t> jump_steps_;
  std::uint64_t steps_;
  std::map<std::uint64_t, StepOverride> overrides_;
};

// Strict schedules require at least this initial multiplier.
inline constexpr std::uint64_t kStrictMinMultiplier = 81;

struct CodeFamilySpec {
  std::uint64_t max_ordinal = 0;
  double horizon_cap = 0.0;
  std::optional<std::vector<std::uint64_t>> explicit_indices;
};

struct StepParams {
  std::uint64_t k = 0;
  std::uint64_t m = 0;
  Magnitude block_length;      // N_k
  std::uint64_t reference = 0;  // p = m - M
  Magnitude reference_length;  // N_p
  std::uint64_t reference_multiplier = 0;  // m_{p+1}
  double epsilon = 1.0;
  double delta = 0.0;
  double alpha_log2 = 0.0;
  CodeFamilySpec codes;
  bool overridden = false;

  double threshold() const { return 2.0 * (epsilon + delta); }
};

StepParams derive_step(const ParamSchedule& sched, std::uint64_t k);

// The code family F for a step, in enumeration order.
std::vector<SlidingBlockCode> step_codes(const StepParams& step, std::uint32_t alphabet_size);

// log2 of m^4 * 2 * 4^m * (2 N_p)^{3/2}.
double alpha_log2(std::uint64_t m, const Magnitude& reference_length);

// log2 of 9 * alpha(m) * (8/9)^{K-1}.
double condition_b_lhs_log2(std::uint64_t m, const Magnitude& reference_length, std::uint64_t K);

// Smallest K with 9 alpha(m) (8/9)^{K-1} < 2^{-(m+2)}. Requires m > M.
std::uint64_t check_condition_b(std::uint64_t M, std::uint64_t m,
                                const Magnitude& reference_length);

struct ConditionAResult {
  enum class Status { verified, violated, inconclusive, vacuous };
  Status status = Status::vacuous;
  std::uint64_t m = 0;
  std::optional<std::uint64_t> ratio;          // N_{K_m} / N_p
  std::optional<std::size_t> witness_L;        // max over offsets of the estimated L
  std::optional<std::size_t> failing_offset;   // first offset l whose estimate failed
  std::size_t required_length = 0;             // prefix length the check needs
  std::string reason;

  bool passed() const { return status == Status::verified || status == Status::vacuous; }
};

const char* to_string(ConditionAResult::Status s);

// Finite-horizon check that N_{K_m}/N_p dominates L(eps_m, m^2) along every
// progression (i N_p + l), 0 <= l < N_p.
ConditionAResult check_condition_a(const ParamSchedule& sched, std::uint64_t m,
                                   const AperiodicSequence& y);

struct WChain {
  double W;
  double W1;
  double W2;
  double W3;
};

// The Hoeffding bracket W and its successive lower bounds W1 >= W2 > W3.
WChain hoeffding_W_chain(double epsilon, double v);

// 2 * 4^m * v^{(epsilon/2) m}: upper bound on P{|mean - E mean| >= epsilon} for
// m independent [-1, 1]-valued variables with variance <= v.
Magnitude hoeffding_tail_bound(double epsilon, double v, std::uint64_t m);

struct GammaBound {
  double value;         // 1 - alpha(m) (8/9)^{k-1}; may be -inf
  double deficit_log2;  // log2 of alpha(m) (8/9)^{k-1}
  bool vacuous;         // value <= 0
};

GammaBound gamma_lower_bound(std::uint64_t k, std::uint64_t m, const Magnitude& reference_length);

// 2/(m-2) + (m-4)/(m-2) * 2(epsilon + delta). Requires m >= 5.
double final_corr_bound(std::uint64_t m, double epsilon, double delta);

// log N - log 2 / (M - 1).
double entropy_floor(std::uint32_t alphabet_size, std::uint64_t initial_multiplier);

struct PlanRow {
  StepParams step;
  std::uint64_t family_bound = 0;  // |F| (at most m)
  GammaBound gamma_bound{};
};

struct JumpCheck {
  std::uint64_t m = 0;
  std::uint64_t configured_K = 0;
  std::uint64_t minimal_K = 0;  // from condition (b)
  bool b_satisfied = false;
  ConditionAResult a;
};

struct PlanReport {
  std::vector<PlanRow> rows;
  std::vector<JumpCheck> jumps;
  double entropy_floor = 0.0;
  bool strict_infeasible = false;  // some N_k is beyond 2^63
  Magnitude max_block_length;
};

// Per-step table and (a)/(b) statuses. Condition (a) is only evaluated when y is given.
PlanReport make_plan(const ParamSchedule& sched, const AperiodicSequence* y);

}  // namespace subshift
