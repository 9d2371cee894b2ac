#include "subshift/correlation.hpp"

#include <cmath>
#include <string>

#include "subshift/errors.hpp"

namespace subshift {

namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 256) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double dot_signs(std::span<const Sign> s, const double* c) {
  const std::size_t n = s.size();
  if (n <= kPairwiseThreshold) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += s[i] * c[i];
    return acc;
  }
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i) prod[i] = s[i] * c[i];
  return pairwise_sum(prod);
}

void check_sweep(std::span<const Sign> fB, const AperiodicSequence& y, std::size_t j_lo,
                 std::size_t j_hi, std::size_t window, std::size_t stride) {
  if (stride < 1) throw ArgumentError("sweep stride must be >= 1");
  if (fB.empty()) throw ArgumentError("coded block must be nonempty");
  if (window < fB.size()) {
    throw ArgumentError("sweep window " + std::to_string(window) +
                        " shorter than coded block " + std::to_string(fB.size()));
  }
  if (j_lo < 1 || j_lo > j_hi) throw ArgumentError("sweep needs 1 <= j_lo <= j_hi");
  if (j_hi + window - 1 > y.length()) {
    throw RangeError("sweep window ending at " + std::to_string(j_hi + window - 1) +
                     " exceeds sequence prefix of length " + std::to_string(y.length()));
  }
}

}  // namespace

double block_average(std::span<const double> block) {
  if (block.empty()) throw ArgumentError("block_average of empty block");
  const double s = block.size() > kPairwiseThreshold ? pairwise_sum(block) : [&] {
    double acc = 0.0;
    for (double x : block) acc += x;
    return acc;
  }();
  return s / static_cast<double>(block.size());
}

double signed_corr(std::span<const Sign> fB, std::span<const double> C) {
  if (fB.empty()) throw ArgumentError("correlation of empty block");
  if (C.size() < fB.size()) {
    throw ArgumentError("correlation block of length " + std::to_string(C.size()) +
                        " shorter than coded block " + std::to_string(fB.size()));
  }
  return dot_signs(fB, C.data()) / static_cast<double>(fB.size());
}

double corr_trimmed(std::span<const Sign> fB, std::span<const double> C) {
  return std::abs(signed_corr(fB, C));
}

CorrSweepResult corr_sweep(std::span<const Sign> fB, const AperiodicSequence& y, std::size_t j_lo,
                           std::size_t j_hi, std::size_t window, double threshold,
                           SweepOptions options) {
  check_sweep(fB, y, j_lo, j_hi, window, options.stride);
  CorrSweepResult res;
  res.argmax_j = j_lo;
  const double* base = y.values().data();
  const double inv = 1.0 / static_cast<double>(fB.size());
  for (std::size_t j = j_lo; j <= j_hi; j += options.stride) {
    const double v = std::abs(dot_signs(fB, base + (j - 1)) * inv);
    ++res.values_requested;
    if (v > res.max_abs) {
      res.max_abs = v;
      res.argmax_j = j;
    }
    if (v >= threshold) {
      if (res.violations.size() < options.violation_cap) {
        res.violations.push_back(j);
      } else {
        res.violations_overflow = true;
      }
    }
  }
  return res;
}

std::optional<std::size_t> first_violation(std::span<const Sign> fB, const AperiodicSequence& y,
                                           std::size_t j_lo, std::size_t j_hi,
                                           std::size_t window, double threshold,
                                           std::size_t stride) {
  check_sweep(fB, y, j_lo, j_hi, window, stride);
  const double* base = y.values().data();
  const double inv = 1.0 / static_cast<double>(fB.size());
  for (std::size_t j = j_lo; j <= j_hi; j += stride) {
    if (std::abs(dot_signs(fB, base + (j - 1)) * inv) >= threshold) return j;
  }
  return std::nullopt;
}

double p_approx_corr(const SlidingBlockCode& f, std::span<const Symbol> B,
                     std::span<const double> C, std::size_t block_len) {
  if (B.size() != C.size()) throw ArgumentError("p_approx_corr: |B| != |C|");
  if (block_len == 0 || B.empty() || B.size() % block_len != 0) {
    throw ArgumentError("p_approx_corr: reference block length must divide |B|");
  }
  if (f.horizon() > block_len) {
    throw ArgumentError("p_approx_corr: code horizon exceeds reference block length");
  }
  const std::size_t q = B.size() / block_len;
  std::vector<Sign> fq;
  double total = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    code_apply_into(f, B.subspan(i * block_len, block_len), fq);
    total += signed_corr(fq, C.subspan(i * block_len, block_len));
  }
  return total / static_cast<double>(q);
}

std::vector<double> prefix_corr_series(std::span<const Symbol> x, const SlidingBlockCode& f,
                                       const AperiodicSequence& y, std::size_t n_max) {
  if (n_max < 1) throw ArgumentError("prefix_corr: n must be >= 1");
  if (x.size() < f.horizon() || n_max > x.size() - f.horizon() + 1) {
    throw ArgumentError("prefix_corr: n = " + std::to_string(n_max) +
                        " needs a point prefix of length " +
                        std::to_string(n_max + f.horizon() - 1));
  }
  if (n_max > y.length()) {
    throw ArgumentError("prefix_corr: n = " + std::to_string(n_max) +
                        " exceeds sequence prefix of length " + std::to_string(y.length()));
  }
  std::vector<Sign> fx;
  code_apply_into(f, x.first(n_max + f.horizon() - 1), fx);
  std::vector<double> out(n_max);
  double acc = 0.0;
  const auto yv = y.values();
  for (std::size_t i = 0; i < n_max; ++i) {
    acc += fx[i] * yv[i];
    out[i] = std::abs(acc / static_cast<double>(i + 1));
  }
  return out;
}

double prefix_corr(std::span<const Symbol> x, const SlidingBlockCode& f,
                   const AperiodicSequence& y, std::size_t n) {
  return prefix_corr_series(x, f, y, n).back();
}

}  // namespace subshift
