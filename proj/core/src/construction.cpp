#include "subshift/construction.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "subshift/errors.hpp"
#include "subshift/random.hpp"

namespace subshift {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr double kWilsonZ = 1.959963984540054;

std::vector<SlidingBlockCode> by_horizon(std::span<const SlidingBlockCode> F) {
  std::vector<SlidingBlockCode> sorted(F.begin(), F.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.horizon() != b.horizon() ? a.horizon() < b.horizon() : a.index() < b.index();
  });
  return sorted;
}

// Candidate c in [0, P^m) <-> tuple of m parent indices, first block most significant.
void decode_candidate(std::uint64_t c, std::uint64_t parent_size, std::span<std::uint32_t> out) {
  for (std::size_t t = out.size(); t-- > 0;) {
    out[t] = static_cast<std::uint32_t>(c % parent_size);
    c /= parent_size;
  }
}

std::uint64_t encode_candidate(std::span<const std::uint32_t> tuple, std::uint64_t parent_size) {
  std::uint64_t c = 0;
  for (auto d : tuple) c = c * parent_size + d;
  return c;
}

std::optional<std::uint64_t> candidate_count(std::uint64_t parent_size, std::uint64_t m) {
  u128 total = 1;
  for (std::uint64_t i = 0; i < m; ++i) {
    total *= parent_size;
    if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(total);
}

// Assembles the concatenation of parent blocks named by `tuple`.
void assemble(std::span<const Symbol> parent_blocks, std::size_t parent_len,
              std::span<const std::uint32_t> tuple, std::span<Symbol> out) {
  for (std::size_t t = 0; t < tuple.size(); ++t) {
    const auto src = parent_blocks.subspan(tuple[t] * parent_len, parent_len);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(t * parent_len));
  }
}

// Index of the first code in F (already horizon-sorted) violating (R), or -1.
struct Filter {
  std::span<const SlidingBlockCode> codes;
  const AperiodicSequence* y;
  std::size_t j_end;
  std::size_t stride;
  double threshold;

  std::ptrdiff_t first_failing(std::span<const Symbol> B, std::vector<Sign>& scratch) const {
    for (std::size_t c = 0; c < codes.size(); ++c) {
      code_apply_into(codes[c], B, scratch);
      if (first_violation(scratch, *y, 1, j_end, B.size(), threshold, stride)) {
        return static_cast<std::ptrdiff_t>(c);
      }
    }
    return -1;
  }
};

// Runs `work(begin, end, slot)` over [0, total) split into chunks, in
// parallel; slot results are merged by the caller in chunk order.
template <typename Work>
void parallel_chunks(std::uint64_t total, unsigned threads, std::size_t chunks, Work&& work) {
  if (chunks == 0) return;
  std::atomic<std::size_t> next{0};
  auto runner = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      const std::uint64_t begin = total * c / chunks;
      const std::uint64_t end = total * (c + 1) / chunks;
      work(begin, end, c);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (n == 1) {
    runner();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(runner);
  for (auto& t : pool) t.join();
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
};

// Population moments when `exact`, sample moments with standard errors otherwise.
Moments moments(std::span<const double> xs, bool exact) {
  Moments mo;
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) return mo;
  double s = 0.0;
  for (double x : xs) s += x;
  mo.mean = s / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = (x - mo.mean) * (x - mo.mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  mo.variance = m2;
  if (!exact && xs.size() > 1) {
    mo.variance = m2 * n / (n - 1.0);
    mo.mean_se = std::sqrt(mo.variance / n);
    mo.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  }
  return mo;
}

}  // namespace

std::pair<double, double> wilson_interval(std::uint64_t passed, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(passed) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::shared_ptr<const BlockFamily> BlockFamily::alphabet_level(Alphabet alphabet) {
  auto f = std::shared_ptr<BlockFamily>(new BlockFamily());
  f->alphabet_ = alphabet;
  f->meta_.mode = "alphabet";
  f->meta_.threshold = 2.0;
  f->log_size_ = std::log(static_cast<double>(alphabet.size()));
  return f;
}

BlockFamily::BlockFamily(std::shared_ptr<const BlockFamily> parent, std::uint64_t multiplier,
                         std::vector<std::uint32_t> members, GammaRecord gamma, BuildMeta meta)
    : parent_(std::move(parent)),
      members_(std::move(members)),
      gamma_(gamma),
      meta_(std::move(meta)) {
  if (!parent_) throw ArgumentError("block family needs a parent");
  if (multiplier < 1) throw ArgumentError("multiplier must be >= 1");
  level_ = parent_->level() + 1;
  alphabet_ = parent_->alphabet();
  multiplier_ = multiplier;
  const u128 len = static_cast<u128>(parent_->block_length()) * multiplier;
  if (len > (u128{1} << 40)) throw SizeError("block length N_k too large to materialize");
  block_length_ = static_cast<std::size_t>(len);
  if (members_.size() % multiplier != 0) {
    throw ArgumentError("member storage is not a whole number of m-tuples");
  }
  const std::size_t parent_size = parent_->size();
  for (auto idx : members_) {
    if (idx >= parent_size) {
      throw ArgumentError("member references parent index " + std::to_string(idx) +
                          " but the parent has " + std::to_string(parent_size) + " members");
    }
  }
  if (meta_.mode == "sample") {
    log_size_ = static_cast<double>(multiplier_) * parent_->log_size() + std::log(gamma_.value());
  } else {
    log_size_ = std::log(static_cast<double>(size()));
  }
}

std::size_t BlockFamily::size() const {
  if (level_ == 0) return alphabet_.size();
  return members_.size() / multiplier_;
}

std::span<const std::uint32_t> BlockFamily::member(std::size_t i) const {
  if (level_ == 0) throw StateError("level 0 members are symbols, not tuples");
  if (i >= size()) {
    throw ArgumentError("member index " + std::to_string(i) + " out of range for family of size " +
                        std::to_string(size()));
  }
  return std::span<const std::uint32_t>(members_).subspan(i * multiplier_, multiplier_);
}

void BlockFamily::materialize_into(std::size_t i, std::span<Symbol> out) const {
  if (i >= size()) {
    throw ArgumentError("member index " + std::to_string(i) + " out of range for family of size " +
                        std::to_string(size()));
  }
  if (out.size() != block_length_) throw ArgumentError("materialize: output length != N_k");
  if (level_ == 0) {
    out[0] = static_cast<Symbol>(i);
    return;
  }
  const std::size_t plen = parent_->block_length();
  const auto tuple = member(i);
  for (std::size_t t = 0; t < multiplier_; ++t) {
    parent_->materialize_into(tuple[t], out.subspan(t * plen, plen));
  }
}

SymbolBlock materialize(const BlockFamily& family, std::size_t index) {
  std::vector<Symbol> out(family.block_length());
  family.materialize_into(index, out);
  return SymbolBlock(family.alphabet(), std::move(out));
}

std::vector<Symbol> materialize_all(const BlockFamily& family) {
  const std::size_t len = family.block_length();
  std::vector<Symbol> out(family.size() * len);
  for (std::size_t i = 0; i < family.size(); ++i) {
    family.materialize_into(i, std::span<Symbol>(out).subspan(i * len, len));
  }
  return out;
}

std::size_t sweep_end(std::uint64_t m, std::size_t block_length, const SweepRange& range) {
  const u128 full = (static_cast<u128>(m) * m - 1) * block_length;
  if (full > (u128{1} << 48)) throw SizeError("sweep range (m^2 - 1) N_k too large");
  auto end = static_cast<std::size_t>(full);
  if (range.j_cap && *range.j_cap < end) end = *range.j_cap;
  return end;
}

std::size_t required_prefix(std::uint64_t m, std::size_t block_length, const SweepRange& range) {
  return sweep_end(m, block_length, range) + block_length - 1;
}

CheckRResult check_R(std::span<const Symbol> B, std::span<const SlidingBlockCode> F,
                     const AperiodicSequence& y, double epsilon, double delta, std::uint64_t m,
                     const SweepRange& range, bool early_abort) {
  if (B.empty()) throw ArgumentError("check_R: empty block");
  if (m < 1) throw ArgumentError("check_R: multiplier must be >= 1");
  if (range.stride < 1) throw ArgumentError("check_R: stride must be >= 1");
  const std::size_t n_k = B.size();
  const std::size_t j_end = sweep_end(m, n_k, range);
  CheckRResult res;
  if (F.empty() || j_end == 0) return res;
  const std::size_t need = j_end + n_k - 1;
  if (y.length() < need) {
    throw RangeError("condition (R) needs a sequence prefix of length " + std::to_string(need) +
                     " (m^2 N_k - 1 with m = " + std::to_string(m) + ", N_k = " +
                     std::to_string(n_k) + "), have " + std::to_string(y.length()));
  }
  const double threshold = 2.0 * (epsilon + delta);
  std::vector<Sign> fB;
  for (const auto& f : by_horizon(F)) {
    if (f.horizon() > n_k) {
      throw ArgumentError("check_R: code horizon " + std::to_string(f.horizon()) +
                          " exceeds block length " + std::to_string(n_k));
    }
    code_apply_into(f, B, fB);
    if (early_abort) {
      if (auto j = first_violation(fB, y, 1, j_end, n_k, threshold, range.stride)) {
        res.pass = false;
        res.violations.push_back({f.index(), *j, corr_trimmed(fB, y.window(*j, n_k))});
        return res;
      }
      continue;
    }
    SweepOptions opt;
    opt.stride = range.stride;
    opt.violation_cap = std::numeric_limits<std::size_t>::max();
    const auto sweep = corr_sweep(fB, y, 1, j_end, n_k, threshold, opt);
    for (auto j : sweep.violations) {
      res.pass = false;
      res.violations.push_back({f.index(), j, corr_trimmed(fB, y.window(j, n_k))});
    }
  }
  return res;
}

BuildResult build_family(const FamilyPtr& parent, const StepParams& step,
                         std::span<const SlidingBlockCode> F, const AperiodicSequence& y,
                         const BuildMode& mode, const BuildOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!parent) throw ArgumentError("build_family: missing parent family");
  if (parent->level() + 1 != step.k) {
    throw StateError("build_family: parent is level " + std::to_string(parent->level()) +
                     " but step k = " + std::to_string(step.k));
  }
  if (options.sweep.stride < 1) throw ArgumentError("sweep stride must be >= 1");
  const std::uint64_t m = step.m;
  const std::uint64_t parent_size = parent->size();
  const std::size_t parent_len = parent->block_length();
  const std::size_t n_k = parent_len * m;
  if (parent_size > std::numeric_limits<std::uint32_t>::max()) {
    throw SizeError("parent family too large for 32-bit member indices");
  }
  const auto codes = by_horizon(F);
  for (const auto& f : codes) {
    if (f.horizon() > n_k) {
      throw ArgumentError("code " + std::to_string(f.index()) + " has horizon " +
                          std::to_string(f.horizon()) + " > N_k = " + std::to_string(n_k));
    }
  }
  const std::size_t j_end = sweep_end(m, n_k, options.sweep);
  if (!codes.empty() && y.length() < j_end + n_k - 1) {
    throw RangeError("step " + std::to_string(step.k) + " needs a sequence prefix of length " +
                     std::to_string(j_end + n_k - 1) + " (m^2 N_k - 1 = " +
                     std::to_string(m * m * n_k - 1) + "), have " + std::to_string(y.length()));
  }

  const std::vector<Symbol> parent_blocks = materialize_all(*parent);
  const Filter filter{codes, &y, j_end, options.sweep.stride, step.threshold()};

  BuildMeta meta;
  meta.mode = mode.kind == BuildMode::Kind::exhaustive ? "exhaustive" : "sample";
  meta.samples = mode.kind == BuildMode::Kind::sample ? mode.samples : 0;
  meta.seed = mode.kind == BuildMode::Kind::sample ? mode.seed : 0;
  for (const auto& f : codes) meta.codes.push_back(f.index());
  meta.epsilon = step.epsilon;
  meta.delta = step.delta;
  meta.threshold = step.threshold();
  meta.j_max = j_end;
  meta.stride = options.sweep.stride;
  meta.j_capped = j_end < sweep_end(m, n_k, SweepRange{});

  struct Slot {
    std::vector<std::uint64_t> passing;  // candidate numbers or sample numbers
    std::vector<std::uint64_t> rejected_by;  // per code
  };

  GammaRecord gamma;
  std::vector<std::uint32_t> members;
  std::vector<std::uint64_t> rejections(codes.size(), 0);
  const unsigned threads = std::max(1u, options.threads);

  if (mode.kind == BuildMode::Kind::exhaustive) {
    const auto total = candidate_count(parent_size, m);
    if (!total || *total > options.candidate_budget) {
      throw SizeError("exhaustive step " + std::to_string(step.k) + " needs " +
                      (total ? std::to_string(*total) : std::string("more than 2^64")) +
                      " candidates, budget is " + std::to_string(options.candidate_budget) +
                      "; use sample mode or raise the candidate budget");
    }
    const std::size_t chunks =
        static_cast<std::size_t>(std::min<std::uint64_t>(*total, threads * 16ull));
    std::vector<Slot> slots(chunks);
    parallel_chunks(*total, threads, chunks,
                    [&](std::uint64_t begin, std::uint64_t end, std::size_t slot) {
                      Slot& s = slots[slot];
                      s.rejected_by.assign(codes.size(), 0);
                      std::vector<std::uint32_t> tuple(m);
                      std::vector<Symbol> B(n_k);
                      std::vector<Sign> scratch;
                      for (std::uint64_t c = begin; c < end; ++c) {
                        decode_candidate(c, parent_size, tuple);
                        assemble(parent_blocks, parent_len, tuple, B);
                        const auto bad = filter.first_failing(B, scratch);
                        if (bad < 0) {
                          s.passing.push_back(c);
                        } else {
                          ++s.rejected_by[static_cast<std::size_t>(bad)];
                        }
                      }
                    });
    std::vector<std::uint32_t> tuple(m);
    for (const auto& s : slots) {
      for (std::size_t c = 0; c < codes.size(); ++c) rejections[c] += s.rejected_by[c];
      for (auto c : s.passing) {
        decode_candidate(c, parent_size, tuple);
        members.insert(members.end(), tuple.begin(), tuple.end());
        ++gamma.passed;
      }
    }
    gamma.kind = GammaRecord::Kind::exact;
    gamma.trials = *total;
    gamma.ci_low = gamma.ci_high = gamma.value();
  } else {
    if (mode.samples < 1) throw ArgumentError("sample mode needs at least one sample");
    if (parent_size == 0) throw StateError("cannot sample from an empty parent family");
    std::mt19937_64 gen(mode.seed);
    std::vector<std::uint32_t> draws(mode.samples * m);
    for (auto& d : draws) d = static_cast<std::uint32_t>(uniform_below(gen, parent_size));
    const std::size_t chunks =
        static_cast<std::size_t>(std::min<std::uint64_t>(mode.samples, threads * 16ull));
    std::vector<Slot> slots(chunks);
    parallel_chunks(mode.samples, threads, chunks,
                    [&](std::uint64_t begin, std::uint64_t end, std::size_t slot) {
                      Slot& s = slots[slot];
                      s.rejected_by.assign(codes.size(), 0);
                      std::vector<Symbol> B(n_k);
                      std::vector<Sign> scratch;
                      for (std::uint64_t i = begin; i < end; ++i) {
                        const auto tuple =
                            std::span<const std::uint32_t>(draws).subspan(i * m, m);
                        assemble(parent_blocks, parent_len, tuple, B);
                        const auto bad = filter.first_failing(B, scratch);
                        if (bad < 0) {
                          s.passing.push_back(i);
                        } else {
                          ++s.rejected_by[static_cast<std::size_t>(bad)];
                        }
                      }
                    });
    std::vector<std::vector<std::uint32_t>> accepted;
    for (const auto& s : slots) {
      for (std::size_t c = 0; c < codes.size(); ++c) rejections[c] += s.rejected_by[c];
      for (auto i : s.passing) {
        const auto tuple = std::span<const std::uint32_t>(draws).subspan(i * m, m);
        accepted.emplace_back(tuple.begin(), tuple.end());
        ++gamma.passed;
      }
    }
    std::sort(accepted.begin(), accepted.end());
    accepted.erase(std::unique(accepted.begin(), accepted.end()), accepted.end());
    for (const auto& t : accepted) members.insert(members.end(), t.begin(), t.end());
    gamma.kind = GammaRecord::Kind::estimate;
    gamma.trials = mode.samples;
    std::tie(gamma.ci_low, gamma.ci_high) = wilson_interval(gamma.passed, gamma.trials);
  }

  auto family = std::make_shared<const BlockFamily>(parent, m, std::move(members), gamma, meta);

  StepReport report;
  report.k = step.k;
  report.m = m;
  report.block_length = n_k;
  report.parent_size = parent_size;
  report.size = family->size();
  report.gamma = gamma;
  report.exhaustive = mode.kind == BuildMode::Kind::exhaustive;
  report.log_size = family->log_size();
  report.entropy_estimate = report.log_size / static_cast<double>(n_k);
  for (std::size_t c = 0; c < codes.size(); ++c) {
    if (rejections[c] > 0) report.rejections_by_code[codes[c].index()] = rejections[c];
  }
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return BuildResult{std::move(family), std::move(report)};
}

SymbolBlock sample_point_prefix(const BlockFamily& family, std::size_t n, std::size_t offset,
                                std::mt19937_64& gen) {
  if (family.size() == 0) throw StateError("cannot sample a point of an empty family");
  if (n < 1) throw ArgumentError("point prefix length must be >= 1");
  const std::size_t len = family.block_length();
  if (offset >= len) throw ArgumentError("offset must lie in [0, N_k)");
  const std::size_t blocks = (offset + n + len - 1) / len;
  std::vector<Symbol> buf(blocks * len);
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto idx = static_cast<std::size_t>(uniform_below(gen, family.size()));
    family.materialize_into(idx, std::span<Symbol>(buf).subspan(b * len, len));
  }
  std::vector<Symbol> out(buf.begin() + static_cast<std::ptrdiff_t>(offset),
                          buf.begin() + static_cast<std::ptrdiff_t>(offset + n));
  return SymbolBlock(family.alphabet(), std::move(out));
}

SymbolBlock sample_point_prefix(const BlockFamily& family, std::size_t n, std::size_t offset,
                                std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return sample_point_prefix(family, n, offset, gen);
}

EntropySeries entropy_series(std::span<const StepReport> reports, std::uint32_t alphabet_size,
                             std::uint64_t initial_multiplier) {
  EntropySeries es;
  es.floor = entropy_floor(alphabet_size, initial_multiplier);
  double acc = std::log(static_cast<double>(alphabet_size));
  for (const auto& r : reports) {
    es.per_step.push_back(r.entropy_estimate);
    acc += std::log(r.gamma.value()) / static_cast<double>(r.block_length);
    es.running_sum.push_back(acc);
    if (r.gamma.value() < 0.5) es.floor_applicable = false;
  }
  return es;
}

AuditResult audit_family(const BlockFamily& family, std::span<const SlidingBlockCode> F,
                         const AperiodicSequence& y, const SweepRange& range,
                         bool check_completeness, unsigned threads) {
  AuditResult res;
  if (family.level() == 0) return res;
  const auto& meta = family.meta();
  const std::uint64_t m = family.multiplier();
  const std::size_t n_k = family.block_length();
  std::vector<Symbol> B(n_k);
  for (std::size_t i = 0; i < family.size(); ++i) {
    family.materialize_into(i, B);
    if (!check_R(B, F, y, meta.epsilon, meta.delta, m, range).pass) res.unsound.push_back(i);
    ++res.members_checked;
  }
  if (!check_completeness) return res;
  const auto& parent = *family.parent();
  const std::uint64_t parent_size = parent.size();
  const auto total = candidate_count(parent_size, m);
  if (!total) throw SizeError("completeness audit: candidate space exceeds 2^64");
  std::vector<std::uint64_t> present;
  present.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    present.push_back(encode_candidate(family.member(i), parent_size));
  }
  std::sort(present.begin(), present.end());
  const std::vector<Symbol> parent_blocks = materialize_all(parent);
  const std::size_t plen = parent.block_length();
  const std::size_t chunks =
      static_cast<std::size_t>(std::min<std::uint64_t>(*total, std::max(1u, threads) * 16ull));
  std::vector<std::vector<std::uint64_t>> missing(chunks);
  parallel_chunks(*total, threads, chunks,
                  [&](std::uint64_t begin, std::uint64_t end, std::size_t slot) {
                    std::vector<std::uint32_t> tuple(m);
                    std::vector<Symbol> cand(n_k);
                    for (std::uint64_t c = begin; c < end; ++c) {
                      if (std::binary_search(present.begin(), present.end(), c)) continue;
                      decode_candidate(c, parent_size, tuple);
                      assemble(parent_blocks, plen, tuple, cand);
                      if (check_R(cand, F, y, meta.epsilon, meta.delta, m, range).pass) {
                        missing[slot].push_back(c);
                      }
                    }
                  });
  for (const auto& v : missing) res.incomplete.insert(res.incomplete.end(), v.begin(), v.end());
  res.candidates_checked = *total;
  res.completeness_checked = true;
  return res;
}

namespace {

// Values of `fn(B)` for B ranging over the members of `family` (exactly when
// small, else `trials` uniform draws).
template <typename Fn>
std::vector<double> over_members(const BlockFamily& family, const DiagnosticsOptions& opt,
                                 std::mt19937_64& gen, bool& exact, Fn&& fn) {
  std::vector<Symbol> B(family.block_length());
  std::vector<double> out;
  exact = family.size() <= opt.exact_limit;
  if (exact) {
    out.reserve(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
      family.materialize_into(i, B);
      out.push_back(fn(B));
    }
  } else {
    out.reserve(opt.trials);
    for (std::uint64_t t = 0; t < opt.trials; ++t) {
      family.materialize_into(static_cast<std::size_t>(uniform_below(gen, family.size())), B);
      out.push_back(fn(B));
    }
  }
  return out;
}

}  // namespace

LemmaDiagnostics diagnostics_lemma(const FamilyPtr& parent, const StepParams& step,
                                   const AperiodicSequence& y, const SlidingBlockCode& f,
                                   std::optional<double> gamma_k,
                                   const DiagnosticsOptions& options) {
  if (!parent || parent->level() + 1 != step.k) {
    throw StateError("diagnostics need the family chain up to step k - 1");
  }
  if (options.trials < 1) throw ArgumentError("diagnostics need at least one trial");
  const std::uint64_t p = step.reference;
  const std::size_t n_p = static_cast<std::size_t>(step.reference_length.require_exact("N_p"));
  if (f.horizon() > n_p) {
    throw ArgumentError("diagnostics need a code with horizon <= N_p = " + std::to_string(n_p));
  }
  std::vector<FamilyPtr> chain(parent->level() + 1);
  for (FamilyPtr cur = parent; cur; cur = cur->parent()) chain[cur->level()] = cur;
  if (p >= chain.size()) throw StateError("reference step beyond the available chain");

  const std::uint64_t m = step.m;
  const std::size_t n_k = parent->block_length() * m;
  std::vector<std::size_t> windows = options.windows;
  if (windows.empty()) windows.push_back(1);
  for (auto j : windows) {
    if (j < 1 || j + n_k - 1 > y.length()) {
      throw RangeError("diagnostic window at j = " + std::to_string(j) + " exceeds the prefix");
    }
  }

  std::mt19937_64 gen(options.seed);
  LemmaDiagnostics d;

  // Part (B): E X over (G_{k-1})^m with X(B) = signed corr of f(B) with C.
  {
    const std::uint64_t P = parent->size();
    const auto total = candidate_count(P, m);
    const bool exact = total && *total <= options.exact_limit;
    const std::vector<Symbol> blocks = materialize_all(*parent);
    const std::size_t plen = parent->block_length();
    std::vector<std::uint32_t> tuple(m);
    std::vector<Symbol> B(n_k);
    std::vector<Sign> fB;
    std::vector<std::vector<double>> xs(windows.size());
    const std::uint64_t count = exact ? *total : options.trials;
    if (P > 0) {
      for (std::uint64_t c = 0; c < count; ++c) {
        if (exact) {
          decode_candidate(c, P, tuple);
        } else {
          for (auto& t : tuple) t = static_cast<std::uint32_t>(uniform_below(gen, P));
        }
        assemble(blocks, plen, tuple, B);
        code_apply_into(f, B, fB);
        for (std::size_t w = 0; w < windows.size(); ++w) {
          xs[w].push_back(signed_corr(fB, y.window(windows[w], n_k)));
        }
      }
    }
    d.expectation_exact = exact;
    d.expectation_bound = step.epsilon + 2.0 * step.delta;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto mo = moments(xs[w], exact);
      if (w == 0 || std::abs(mo.mean) > std::abs(d.expectation)) {
        d.expectation = mo.mean;
        d.expectation_se = mo.mean_se;
        d.expectation_j = windows[w];
      }
    }
    d.expectation_within = std::abs(d.expectation) < d.expectation_bound;
  }

  // Part (A).
  for (std::uint64_t s = p + 1; s < step.k; ++s) d.gamma_deficit_sum += 1.0 - chain[s]->gamma().value();
  d.gamma_deficit_bound = step.delta / 2.0;
  d.part_a_holds = d.gamma_deficit_sum < d.gamma_deficit_bound;

  // Part (C).
  d.gamma_measured = gamma_k;
  d.gamma_bound = gamma_lower_bound(step.k, m, step.reference_length);
  d.part_c_holds = !gamma_k || *gamma_k > d.gamma_bound.value;

  // Variance recursion for the p-approximate correlation on G_s, s = p..k-1.
  auto variance_on = [&](const BlockFamily& fam, std::size_t j, bool& exact, double& se) {
    const std::size_t len = fam.block_length();
    const auto C = y.window(j, len);
    const auto xs = over_members(fam, options, gen, exact, [&](std::span<const Symbol> B) {
      return p_approx_corr(f, B, C, n_p);
    });
    const auto mo = moments(xs, exact);
    se = mo.variance_se;
    return mo.variance;
  };
  double recursive = 2.0;
  for (std::uint64_t s = p; s < step.k; ++s) {
    const BlockFamily& fam = *chain[s];
    LevelVariance lv;
    lv.level = s;
    lv.exact = true;
    for (auto j : windows) {
      bool exact = false;
      double se = 0.0;
      const double v = variance_on(fam, j, exact, se);
      if (v >= lv.measured) {
        lv.measured = v;
        lv.standard_error = se;
      }
      lv.exact = lv.exact && exact;
    }
    if (s == p) {
      lv.ceiling_recursive = 2.0;
      lv.ceiling_from_parent = 2.0;
    } else {
      const BlockFamily& par = *chain[s - 1];
      const double ratio =
          static_cast<double>(par.block_length()) / static_cast<double>(fam.block_length());
      recursive = 4.0 * ratio * recursive;
      lv.ceiling_recursive = recursive;
      double parent_max = 0.0;
      for (auto j : windows) {
        for (std::uint64_t i = 0; i < fam.multiplier(); ++i) {
          bool exact = false;
          double se = 0.0;
          parent_max = std::max(parent_max, variance_on(par, j + i * par.block_length(), exact, se));
        }
      }
      lv.ceiling_from_parent = 4.0 * ratio * parent_max;
    }
    d.variances.push_back(lv);
  }
  return d;
}

UncorrelationReport verify_uncorrelation(const BlockFamily& family, const StepParams& step,
                                         const AperiodicSequence& y,
                                         std::span<const SlidingBlockCode> F,
                                         const UncorrelationOptions& options) {
  UncorrelationReport rep;
  const std::uint64_t m = family.multiplier();
  rep.bound = final_corr_bound(m, step.epsilon, step.delta);
  const std::size_t n_k = family.block_length();
  const std::size_t lo = (m - 2) * n_k + 1;
  const std::size_t hi = m * m * n_k - 1;
  std::vector<std::size_t> grid = options.n_grid;
  if (grid.empty()) {
    for (std::size_t n = lo; n <= hi; ++n) grid.push_back(n);
  }
  for (auto n : grid) {
    if (n < lo || n > hi) {
      throw ArgumentError("n = " + std::to_string(n) + " outside the admissible window (" +
                          std::to_string(lo - 1) + ", " + std::to_string(hi + 1) + ")");
    }
  }
  for (auto o : options.offsets) {
    if (o >= n_k) throw ArgumentError("offset " + std::to_string(o) + " not below N_k");
  }
  if (F.empty() || grid.empty()) return rep;
  if (family.size() == 0) throw StateError("cannot verify an empty family");
  const std::size_t n_max = *std::max_element(grid.begin(), grid.end());
  if (n_max > y.length()) {
    throw RangeError("verification needs a sequence prefix of length " + std::to_string(n_max));
  }
  std::size_t r_max = 1;
  for (const auto& f : F) r_max = std::max(r_max, f.horizon());
  std::mt19937_64 gen(options.seed);
  for (std::size_t s = 0; s < options.samples; ++s) {
    for (auto offset : options.offsets) {
      const auto x = sample_point_prefix(family, n_max + r_max - 1, offset, gen);
      for (const auto& f : F) {
        const auto series = prefix_corr_series(x.symbols(), f, y, n_max);
        for (auto n : grid) {
          const double v = series[n - 1];
          ++rep.checks;
          rep.max_observed = std::max(rep.max_observed, v);
          if (v > rep.bound + options.tolerance) {
            rep.violations.push_back({s, offset, f.index(), n, v});
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace subshift
