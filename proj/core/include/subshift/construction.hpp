#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "subshift/codes.hpp"
#include "subshift/correlation.hpp"
#include "subshift/schedule.hpp"
#include "subshift/sequences.hpp"

namespace subshift {

// Fraction of candidates passing condition (R). Exhaustive builds record the
// exact rational passed/trials; sampled builds record raw trial counts with a
// 95% Wilson interval.
struct GammaRecord {
  enum class Kind { exact, estimate };
  Kind kind = Kind::exact;
  std::uint64_t passed = 0;
  std::uint64_t trials = 0;
  double ci_low = 1.0;
  double ci_high = 1.0;

  double value() const {
    return trials == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(trials);
  }
  bool straddles_half() const { return ci_low < 0.5 && ci_high >= 0.5; }
};

// 95% Wilson score interval for `passed` successes in `trials`.
std::pair<double, double> wilson_interval(std::uint64_t passed, std::uint64_t trials);

struct BuildMeta {
  std::string mode = "exhaustive";  // exhaustive | sample | alphabet
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> codes;  // enumeration indices, ascending horizon
  double epsilon = 1.0;
  double delta = 0.0;
  double threshold = 2.0;
  std::size_t j_max = 0;  // last swept start position
  std::size_t stride = 1;
  bool j_capped = false;  // j_max below (m^2 - 1) N_k
};

// G_k: blocks of length N_k, each an m-fold concatenation of G_{k-1} blocks,
// stored as tuples of parent indices. Level 0 is the alphabet itself.
class BlockFamily {
 public:
  static std::shared_ptr<const BlockFamily> alphabet_level(Alphabet alphabet);

  BlockFamily(std::shared_ptr<const BlockFamily> parent, std::uint64_t multiplier,
              std::vector<std::uint32_t> members, GammaRecord gamma, BuildMeta meta);

  std::uint64_t level() const { return level_; }
  std::size_t block_length() const { return block_length_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::uint64_t multiplier() const { return multiplier_; }
  std::size_t size() const;
  const std::shared_ptr<const BlockFamily>& parent() const { return parent_; }
  const GammaRecord& gamma() const { return gamma_; }
  const BuildMeta& meta() const { return meta_; }

  // log |G_k|: exact for exhaustive families, m log|G_{k-1}| + log(gamma)
  // for sampled ones (whose stored members are only the distinct accepted draws).
  double log_size() const { return log_size_; }

  // Parent indices of member i (level >= 1).
  std::span<const std::uint32_t> member(std::size_t i) const;
  std::span<const std::uint32_t> flat_members() const { return members_; }

  // Expands member i into `out`, which must hold block_length() symbols.
  void materialize_into(std::size_t i, std::span<Symbol> out) const;

 private:
  BlockFamily() = default;

  std::uint64_t level_ = 0;
  std::size_t block_length_ = 1;
  Alphabet alphabet_{2};
  std::uint64_t multiplier_ = 1;
  std::shared_ptr<const BlockFamily> parent_;
  std::vector<std::uint32_t> members_;
  GammaRecord gamma_;
  BuildMeta meta_;
  double log_size_ = 0.0;
};

using FamilyPtr = std::shared_ptr<const BlockFamily>;

// Recursive expansion of a member down to symbols; length N_k.
SymbolBlock materialize(const BlockFamily& family, std::size_t index);

// All members expanded back to back: member i occupies [i N_k, (i+1) N_k).
std::vector<Symbol> materialize_all(const BlockFamily& family);

struct SweepRange {
  std::size_t stride = 1;
  std::optional<std::size_t> j_cap;  // relaxed mode only
};

// Last start position swept by condition (R) for blocks of length N_k.
std::size_t sweep_end(std::uint64_t m, std::size_t block_length, const SweepRange& range);

// Shortest prefix that condition (R) needs: (m^2 - 1) N_k + N_k - 1.
std::size_t required_prefix(std::uint64_t m, std::size_t block_length, const SweepRange& range);

struct RViolation {
  std::uint64_t code_index;
  std::size_t j;
  double value;
};

struct CheckRResult {
  bool pass = true;
  std::vector<RViolation> violations;
};

// Condition (R): for every f in F and every swept j in [1, (m^2 - 1) N_k],
// corr_trimmed(f(B), y_j^{j+N_k-1}) < 2(epsilon + delta). With early_abort
// only the first violation is recorded.
CheckRResult check_R(std::span<const Symbol> B, std::span<const SlidingBlockCode> F,
                     const AperiodicSequence& y, double epsilon, double delta, std::uint64_t m,
                     const SweepRange& range = {}, bool early_abort = true);

struct BuildMode {
  enum class Kind { exhaustive, sample };
  Kind kind = Kind::exhaustive;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct BuildOptions {
  SweepRange sweep;
  unsigned threads = 1;
  std::uint64_t candidate_budget = 10'000'000;
};

struct StepReport {
  std::uint64_t k = 0;
  std::uint64_t m = 0;
  std::size_t block_length = 0;
  std::uint64_t parent_size = 0;
  std::uint64_t size = 0;  // |G_k|
  GammaRecord gamma;
  bool exhaustive = true;
  double log_size = 0.0;         // log |G_k|, estimated in sample mode
  double entropy_estimate = 0.0;  // log |G_k| / N_k
  std::map<std::uint64_t, std::uint64_t> rejections_by_code;  // first failing code -> count
  double wall_ms = 0.0;
};

struct BuildResult {
  FamilyPtr family;
  StepReport report;
};

// One construction step: filters (G_{k-1})^m through condition (R).
BuildResult build_family(const FamilyPtr& parent, const StepParams& step,
                         std::span<const SlidingBlockCode> F, const AperiodicSequence& y,
                         const BuildMode& mode, const BuildOptions& options = {});

// Uniformly chosen members concatenated, `offset` leading symbols dropped,
// first n symbols returned.
SymbolBlock sample_point_prefix(const BlockFamily& family, std::size_t n, std::size_t offset,
                                std::mt19937_64& gen);
SymbolBlock sample_point_prefix(const BlockFamily& family, std::size_t n, std::size_t offset,
                                std::uint64_t seed);

struct EntropySeries {
  std::vector<double> per_step;     // log|G_k| / N_k
  std::vector<double> running_sum;  // log N + sum_{s<=k} log(gamma_s) / N_s
  double floor = 0.0;               // log N - log 2 / (M - 1)
  bool floor_applicable = true;     // every gamma_s >= 1/2
};

EntropySeries entropy_series(std::span<const StepReport> reports, std::uint32_t alphabet_size,
                             std::uint64_t initial_multiplier);

struct AuditResult {
  std::size_t members_checked = 0;
  std::vector<std::size_t> unsound;  // members failing a fresh check_R
  std::uint64_t candidates_checked = 0;
  std::vector<std::uint64_t> incomplete;  // passing candidates missing from the family
  bool completeness_checked = false;
};

// Fresh re-run of condition (R) on every member and, if requested, on every
// candidate of (G_{k-1})^m (exhaustive families only).
AuditResult audit_family(const BlockFamily& family, std::span<const SlidingBlockCode> F,
                         const AperiodicSequence& y, const SweepRange& range,
                         bool check_completeness, unsigned threads = 1);

struct LevelVariance {
  std::uint64_t level = 0;
  double measured = 0.0;           // max over windows of the variance on G_s
  double standard_error = 0.0;     // 0 when computed exactly
  bool exact = false;
  double ceiling_recursive = 2.0;  // 4 (N_{s-1}/N_s) v_{s-1}, v_p = 2
  double ceiling_from_parent = 2.0;  // 4 (N_{s-1}/N_s) * measured parent variance
};

struct LemmaDiagnostics {
  double expectation = 0.0;  // E X at the window with largest |E X|
  double expectation_se = 0.0;
  std::size_t expectation_j = 0;
  double expectation_bound = 0.0;  // epsilon + 2 delta
  bool expectation_within = true;
  bool expectation_exact = false;

  double gamma_deficit_sum = 0.0;  // sum_{s=p+1}^{k-1} (1 - gamma_s)
  double gamma_deficit_bound = 0.0;  // delta / 2
  bool part_a_holds = true;

  std::optional<double> gamma_measured;
  GammaBound gamma_bound{};
  bool part_c_holds = true;

  std::vector<LevelVariance> variances;
};

struct DiagnosticsOptions {
  std::vector<std::size_t> windows;  // 1-based start positions of C
  std::uint64_t trials = 2000;
  std::uint64_t seed = 0;
  std::uint64_t exact_limit = std::uint64_t{1} << 16;
};

// Numeric diagnostics for the three lemma parts at step k with parent G_{k-1}.
// `gamma_k` is the measured gamma of the built step, when available.
LemmaDiagnostics diagnostics_lemma(const FamilyPtr& parent, const StepParams& step,
                                   const AperiodicSequence& y, const SlidingBlockCode& f,
                                   std::optional<double> gamma_k,
                                   const DiagnosticsOptions& options);

struct UncorrelationViolation {
  std::size_t sample;
  std::size_t offset;
  std::uint64_t code_index;
  std::size_t n;
  double value;
};

struct UncorrelationReport {
  double bound = 0.0;
  double max_observed = 0.0;
  std::uint64_t checks = 0;
  std::vector<UncorrelationViolation> violations;
};

struct UncorrelationOptions {
  std::vector<std::size_t> n_grid;  // empty: every admissible n
  std::vector<std::size_t> offsets = {0};
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
};

// Checks prefix_corr <= final_corr_bound(m, epsilon, delta) + tolerance for
// sampled point prefixes, codes in F and n in ((m-2) N_k, m^2 N_k).
UncorrelationReport verify_uncorrelation(const BlockFamily& family, const StepParams& step,
                                         const AperiodicSequence& y,
                                         std::span<const SlidingBlockCode> F,
                                         const UncorrelationOptions& options);

}  // namespace subshift
