#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace subshift {

struct Provenance {
  enum class Kind { mobius, bernoulli, file, values };
  Kind kind = Kind::values;
  std::uint64_t seed = 0;  // bernoulli only
  std::string path;        // file only

  std::string describe() const;
};

// Finite prefix y_1..y_n of a bounded real sequence with |y_i| <= 1.
//
// Indexing is 1-based throughout the public interface. Immutable after
// construction; a prefix-sum table is built once so interval sums are O(1).
class AperiodicSequence {
 public:
  AperiodicSequence(std::vector<double> values, Provenance provenance);

  std::size_t length() const { return values_.size(); }
  const Provenance& provenance() const { return provenance_; }

  // y_i for 1 <= i <= length(); throws RangeError otherwise.
  double at(std::size_t i) const;
  double operator[](std::size_t i) const { return values_[i - 1]; }

  // Contiguous view of y_first..y_{first+count-1}; throws RangeError on overflow.
  std::span<const double> window(std::size_t first, std::size_t count) const;
  std::span<const double> values() const { return values_; }

  // Sum of y_a..y_b via the prefix table. Requires 1 <= a <= b + 1, b <= length().
  double range_sum(std::size_t a, std::size_t b) const;

 private:
  std::vector<double> values_;
  std::vector<double> prefix_;  // prefix_[i] = y_1 + ... + y_i
  Provenance provenance_;
};

// Upper bound on sieve length accepted by mobius_sieve unless overridden.
inline constexpr std::size_t kDefaultSieveLimit = std::size_t{1} << 31;

// Möbius values mu_1..mu_{n_max}, linear sieve.
AperiodicSequence mobius_sieve(std::size_t n_max, std::size_t limit = kDefaultSieveLimit);

// n independent fair ±1 values from a seeded mt19937_64 (platform independent).
AperiodicSequence bernoulli_sequence(std::uint64_t seed, std::size_t n);

// One real per line, line 1 = y_1. Rejects non-numeric lines and values outside [-1, 1].
AperiodicSequence load_sequence_file(const std::filesystem::path& path);
void write_sequence_file(const AperiodicSequence& y, const std::filesystem::path& path);

// (1/n) * sum_{i=1..n} y_{i*t + l}.
double ap_average(const AperiodicSequence& y, std::size_t t, std::size_t l, std::size_t n);

struct ApRow {
  std::size_t t;
  std::size_t l;
  std::size_t n;
  double abs_average;
};

// |ap_average| over t <= t_max, l < t, n in checkpoints. No judgement is made.
std::vector<ApRow> aperiodicity_report(const AperiodicSequence& y, std::size_t t_max,
                                       std::span<const std::size_t> checkpoints);

// (1/(b-a+1)) * sum_{i=a..b} y_i.
double interval_average(const AperiodicSequence& y, std::size_t a, std::size_t b);

// Finite-horizon certificate for the interval-average threshold L(eps, m):
// the least L0 <= L_max such that for every L in [L0, L_max] all intervals
// I within [1, m*L] with |I| >= L have |average| < eps. nullopt if L_max
// itself fails. Requires m * L_max <= y.length().
std::optional<std::size_t> estimate_L(const AperiodicSequence& y, double epsilon,
                                      std::size_t m, std::size_t L_max);

// estimate_L applied to z_i = y_{i*step + offset}, i >= 1.
std::optional<std::size_t> estimate_L_progression(const AperiodicSequence& y, std::size_t step,
                                                  std::size_t offset, double epsilon,
                                                  std::size_t m, std::size_t L_max);

// Core of both estimators, over an explicit 0-based vector z (z[0] = z_1).
std::optional<std::size_t> estimate_L_values(std::span<const double> z, double epsilon,
                                             std::size_t m, std::size_t L_max);

}  // namespace subshift
