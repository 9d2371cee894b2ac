#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace subshift {

using Symbol = std::uint32_t;
using Sign = std::int8_t;

// Alphabet {0, ..., N-1} with N >= 2.
class Alphabet {
 public:
  explicit Alphabet(std::uint32_t size);
  std::uint32_t size() const { return size_; }
  bool contains(Symbol s) const { return s < size_; }
  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::uint32_t size_;
};

// Word over an alphabet. Symbols are 0-based.
class SymbolBlock {
 public:
  SymbolBlock(Alphabet alphabet, std::vector<Symbol> symbols);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t length() const { return symbols_.size(); }
  std::span<const Symbol> symbols() const { return symbols_; }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }

  friend bool operator==(const SymbolBlock&, const SymbolBlock&) = default;

 private:
  Alphabet alphabet_;
  std::vector<Symbol> symbols_;
};

// Word over {-1, +1}.
class SignBlock {
 public:
  explicit SignBlock(std::vector<Sign> signs);
  std::size_t length() const { return signs_.size(); }
  std::span<const Sign> signs() const { return signs_; }
  Sign operator[](std::size_t i) const { return signs_[i]; }
  friend bool operator==(const SignBlock&, const SignBlock&) = default;

 private:
  std::vector<Sign> signs_;
};

// Largest table (in cells) a code may carry; caps horizon at 24 / log2(N).
inline constexpr std::size_t kMaxCodeCells = std::size_t{1} << 24;

// A {-1, +1}-valued function of r consecutive symbols, stored as a flat
// table of N^r signs in lexicographic cell order (first coordinate most
// significant). The horizon is always minimal: for r >= 2 the table depends
// on its last coordinate.
//
// Enumeration: codes are ordered by horizon, then within a horizon by the
// table read as a base-2 number (cell 0 most significant, -1 -> 0, +1 -> 1),
// skipping tables that do not depend on the last coordinate. `index()` is
// the 0-based position in that order; `ordinal()` = index() + 1 is the
// 1-based position used when selecting code families.
class SlidingBlockCode {
 public:
  // Builds the code defined by `table` over `horizon` coordinates, reducing
  // to the minimal horizon. Throws ArgumentError on malformed input.
  static SlidingBlockCode from_table(Alphabet alphabet, std::size_t horizon,
                                     std::vector<Sign> table);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t horizon() const { return horizon_; }
  std::span<const Sign> table() const { return table_; }
  // Tables built directly may lie beyond 64-bit enumeration; index() then
  // throws SizeError.
  bool has_index() const { return index_.has_value(); }
  std::uint64_t index() const;
  std::uint64_t ordinal() const { return index() + 1; }

  // Value on the window w[0..horizon-1].
  Sign operator()(std::span<const Symbol> window) const;

  friend bool operator==(const SlidingBlockCode& a, const SlidingBlockCode& b) {
    return a.alphabet_ == b.alphabet_ && a.horizon_ == b.horizon_ && a.table_ == b.table_;
  }

 private:
  SlidingBlockCode(Alphabet alphabet, std::size_t horizon, std::vector<Sign> table,
                   std::optional<std::uint64_t> index)
      : alphabet_(alphabet), horizon_(horizon), table_(std::move(table)), index_(index) {}

  friend SlidingBlockCode code_from_index(std::uint64_t, std::uint32_t);

  Alphabet alphabet_;
  std::size_t horizon_;
  std::vector<Sign> table_;
  std::optional<std::uint64_t> index_;
};

// f(B)_i = f(b_i, ..., b_{i+r-1}); output length B.length() - r + 1.
SignBlock code_apply(const SlidingBlockCode& f, std::span<const Symbol> block);
SignBlock code_apply(const SlidingBlockCode& f, const SymbolBlock& block);

// Writes f(B) into `out` (resized). Allocation-free variant for hot loops.
void code_apply_into(const SlidingBlockCode& f, std::span<const Symbol> block,
                     std::vector<Sign>& out);

// Inverse pair of the canonical enumeration. code_index throws SizeError when
// the index does not fit in 64 bits.
SlidingBlockCode code_from_index(std::uint64_t idx, std::uint32_t alphabet_size);
std::uint64_t code_index(const SlidingBlockCode& f);

// Number of codes whose minimal horizon is exactly r (saturating at 2^64 - 1).
std::uint64_t codes_with_horizon(std::uint32_t alphabet_size, std::size_t r);

// Codes with ordinal <= max_ordinal and horizon <= horizon_cap, in
// enumeration order. Monotone in both arguments.
std::vector<SlidingBlockCode> eligible_codes(std::uint32_t alphabet_size,
                                             std::uint64_t max_ordinal, double horizon_cap);

// |eligible_codes(...)| without materializing the tables.
std::uint64_t eligible_code_count(std::uint32_t alphabet_size, std::uint64_t max_ordinal,
                                  double horizon_cap);

// Digit string for N <= 10; comma-separated otherwise.
std::string block_to_string(const SymbolBlock& block);

}  // namespace subshift
