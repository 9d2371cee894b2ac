#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "subshift/codes.hpp"
#include "subshift/sequences.hpp"

namespace subshift {

// Windows longer than this are summed pairwise.
inline constexpr std::size_t kPairwiseThreshold = std::size_t{1} << 16;

double block_average(std::span<const double> block);

// Signed mean of fB_i * C_i over the length of fB; C is trimmed at the end.
double signed_corr(std::span<const Sign> fB, std::span<const double> C);

// |signed_corr|. Throws ArgumentError when C is shorter than fB.
double corr_trimmed(std::span<const Sign> fB, std::span<const double> C);
inline double corr_trimmed(const SignBlock& fB, std::span<const double> C) {
  return corr_trimmed(fB.signs(), C);
}

struct CorrSweepResult {
  double max_abs = 0.0;
  std::size_t argmax_j = 0;
  std::size_t values_requested = 0;
  std::vector<std::size_t> violations;  // swept j with value >= threshold, capped
  bool violations_overflow = false;
};

struct SweepOptions {
  std::size_t stride = 1;
  std::size_t violation_cap = 1024;
};

// corr_trimmed(fB, y_j^{j+window-1}) for j = j_lo, j_lo + stride, ..., <= j_hi.
CorrSweepResult corr_sweep(std::span<const Sign> fB, const AperiodicSequence& y, std::size_t j_lo,
                           std::size_t j_hi, std::size_t window, double threshold,
                           SweepOptions options = {});

// First swept j whose correlation reaches `threshold`, or nullopt. Same sweep
// order and preconditions as corr_sweep.
std::optional<std::size_t> first_violation(std::span<const Sign> fB, const AperiodicSequence& y,
                                           std::size_t j_lo, std::size_t j_hi,
                                           std::size_t window, double threshold,
                                           std::size_t stride = 1);

// p-approximate correlation: B and C are cut into q = |B| / block_len pieces
// Q_i and U_i I_i with |U_i| = block_len - r + 1, |I_i| = r - 1; returns the
// signed mean over i of avg(f(Q_i) U_i).
double p_approx_corr(const SlidingBlockCode& f, std::span<const Symbol> B,
                     std::span<const double> C, std::size_t block_len);

// |(1/n) sum_{i=1..n} f(x_i, ..., x_{i+r-1}) y_i|.
double prefix_corr(std::span<const Symbol> x, const SlidingBlockCode& f,
                   const AperiodicSequence& y, std::size_t n);

// prefix_corr for every n in [1, n_max] at once; entry n-1 holds the value for n.
std::vector<double> prefix_corr_series(std::span<const Symbol> x, const SlidingBlockCode& f,
                                       const AperiodicSequence& y, std::size_t n_max);

}  // namespace subshift
