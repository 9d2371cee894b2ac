#include "subshift/codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subshift/errors.hpp"

namespace subshift {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr u128 kU128Max = ~u128{0};
constexpr u128 kSaturated = u128{1} << 126;

// N^r, or 0 if it exceeds the table cap.
std::size_t cell_count(std::uint32_t n, std::size_t r) {
  std::size_t cells = 1;
  for (std::size_t i = 0; i < r; ++i) {
    if (cells > kMaxCodeCells / n) return 0;
    cells *= n;
  }
  return cells;
}

u128 pow2_saturating(u128 exponent) {
  return exponent >= 126 ? kSaturated : (u128{1} << static_cast<unsigned>(exponent));
}

// Number of tables over r coordinates with minimal horizon exactly r,
// saturating at 2^126. The exponents N^r are computed without the table cap.
u128 block_size(std::uint32_t n, std::size_t r) {
  auto power = [n](std::size_t e) -> u128 {
    u128 p = 1;
    for (std::size_t i = 0; i < e; ++i) {
      p *= n;
      if (p >= 128) return 128;
    }
    return p;
  };
  const u128 hi = pow2_saturating(power(r));
  if (r == 1) return hi;
  const u128 lo = pow2_saturating(power(r - 1));
  if (hi == kSaturated) return kSaturated;
  return hi - lo;
}

// Index of the first code with horizon r.
u128 horizon_offset(std::uint32_t n, std::size_t r) {
  u128 off = 0;
  for (std::size_t s = 1; s < r; ++s) {
    off += block_size(n, s);
    if (off >= kSaturated) return kSaturated;
  }
  return off;
}

bool bit_at(u128 value, std::size_t pos) { return pos < 128 && ((value >> pos) & 1) != 0; }

// Number of horizon-deficient tables (constant on every run of N cells that
// differ only in the last coordinate) whose base-2 value is <= t.
u128 count_deficient_upto(u128 t, std::uint32_t n, std::size_t cells) {
  const std::size_t groups = cells / n;
  u128 u = 0;
  for (std::size_t j = 0; j < groups; ++j) {
    const std::size_t low = cells - (j + 1) * n;
    if (low >= 128) {
      u <<= 1;  // group bits are zero in t, only bit 0 is admissible
      continue;
    }
    bool all_set = true;
    bool any_set = false;
    for (std::size_t b = 0; b < n; ++b) {
      const bool s = bit_at(t, low + b);
      all_set = all_set && s;
      any_set = any_set || s;
    }
    if (all_set) {
      u = (u << 1) | 1;
    } else if (!any_set) {
      u <<= 1;
    } else {
      const std::size_t rest = groups - j - 1;
      u <<= 1;
      u = (u << rest) | ((u128{1} << rest) - 1);
      return u + 1;
    }
  }
  return u + 1;
}

// True iff the table over `cells` cells ignores its last coordinate.
bool ignores_last(std::span<const Sign> table, std::uint32_t n) {
  for (std::size_t g = 0; g < table.size(); g += n) {
    for (std::size_t b = 1; b < n; ++b) {
      if (table[g + b] != table[g]) return false;
    }
  }
  return true;
}

}  // namespace

Alphabet::Alphabet(std::uint32_t size) : size_(size) {
  if (size < 2) throw ArgumentError("alphabet size must be >= 2, got " + std::to_string(size));
}

SymbolBlock::SymbolBlock(Alphabet alphabet, std::vector<Symbol> symbols)
    : alphabet_(alphabet), symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw ArgumentError("symbol block must be nonempty");
  for (Symbol s : symbols_) {
    if (!alphabet_.contains(s)) {
      throw ArgumentError("symbol " + std::to_string(s) + " not in alphabet of size " +
                          std::to_string(alphabet_.size()));
    }
  }
}

SignBlock::SignBlock(std::vector<Sign> signs) : signs_(std::move(signs)) {
  for (Sign s : signs_) {
    if (s != 1 && s != -1) throw ArgumentError("sign block entries must be -1 or +1");
  }
}

SlidingBlockCode SlidingBlockCode::from_table(Alphabet alphabet, std::size_t horizon,
                                              std::vector<Sign> table) {
  const std::uint32_t n = alphabet.size();
  if (horizon < 1) throw ArgumentError("code horizon must be >= 1");
  const std::size_t cells = cell_count(n, horizon);
  if (cells == 0) throw SizeError("code table N^r exceeds the table size cap");
  if (table.size() != cells) {
    throw ArgumentError("code table has " + std::to_string(table.size()) + " cells, expected " +
                        std::to_string(cells));
  }
  for (Sign s : table) {
    if (s != 1 && s != -1) throw ArgumentError("code table entries must be -1 or +1");
  }
  while (horizon > 1 && ignores_last(table, n)) {
    std::vector<Sign> reduced;
    reduced.reserve(table.size() / n);
    for (std::size_t c = 0; c < table.size(); c += n) reduced.push_back(table[c]);
    table = std::move(reduced);
    --horizon;
  }
  SlidingBlockCode f(alphabet, horizon, std::move(table), std::nullopt);
  try {
    f.index_ = code_index(f);
  } catch (const SizeError&) {
    // still a valid code, just past the enumerable range
  }
  return f;
}

std::uint64_t SlidingBlockCode::index() const {
  if (!index_) throw SizeError("code index does not fit in 64 bits");
  return *index_;
}

Sign SlidingBlockCode::operator()(std::span<const Symbol> window) const {
  if (window.size() < horizon_) throw ArgumentError("window shorter than code horizon");
  std::size_t cell = 0;
  for (std::size_t i = 0; i < horizon_; ++i) cell = cell * alphabet_.size() + window[i];
  return table_[cell];
}

void code_apply_into(const SlidingBlockCode& f, std::span<const Symbol> block,
                     std::vector<Sign>& out) {
  const std::size_t r = f.horizon();
  if (block.size() < r) {
    throw ArgumentError("block of length " + std::to_string(block.size()) +
                        " shorter than code horizon " + std::to_string(r));
  }
  const std::uint32_t n = f.alphabet().size();
  const auto table = f.table();
  const std::size_t out_len = block.size() - r + 1;
  out.resize(out_len);
  if (r == 1) {
    for (std::size_t i = 0; i < out_len; ++i) out[i] = table[block[i]];
    return;
  }
  const std::size_t modulus = table.size() / n;  // N^(r-1)
  std::size_t cell = 0;
  for (std::size_t i = 0; i + 1 < r; ++i) cell = cell * n + block[i];
  for (std::size_t i = 0; i < out_len; ++i) {
    cell = (cell % modulus) * n + block[i + r - 1];
    out[i] = table[cell];
  }
}

SignBlock code_apply(const SlidingBlockCode& f, std::span<const Symbol> block) {
  std::vector<Sign> out;
  code_apply_into(f, block, out);
  return SignBlock(std::move(out));
}

SignBlock code_apply(const SlidingBlockCode& f, const SymbolBlock& block) {
  if (!(f.alphabet() == block.alphabet())) {
    throw ArgumentError("code and block use different alphabets");
  }
  return code_apply(f, block.symbols());
}

SlidingBlockCode code_from_index(std::uint64_t idx, std::uint32_t alphabet_size) {
  const Alphabet alphabet(alphabet_size);
  const std::uint32_t n = alphabet_size;
  std::size_t r = 1;
  u128 rank = idx;
  for (;;) {
    const u128 size = block_size(n, r);
    if (rank < size) break;
    rank -= size;
    ++r;
  }
  const std::size_t cells = cell_count(n, r);
  if (cells == 0) {
    throw SizeError("code " + std::to_string(idx) + " has horizon " + std::to_string(r) +
                    ", beyond the table size cap");
  }
  u128 t = rank;
  if (r > 1) {
    u128 skipped = 0;
    for (;;) {
      t = rank + skipped;
      const u128 c = count_deficient_upto(t, n, cells);
      if (c == skipped) break;
      skipped = c;
    }
  }
  std::vector<Sign> table(cells);
  for (std::size_t i = 0; i < cells; ++i) table[i] = bit_at(t, cells - 1 - i) ? 1 : -1;
  return SlidingBlockCode(alphabet, r, std::move(table), idx);
}

std::uint64_t code_index(const SlidingBlockCode& f) {
  const std::uint32_t n = f.alphabet().size();
  const auto table = f.table();
  const std::size_t cells = table.size();
  u128 t = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    if (table[i] != 1) continue;
    const std::size_t pos = cells - 1 - i;
    if (pos >= 127) throw SizeError("code index does not fit in 64 bits");
    t |= u128{1} << pos;
  }
  u128 rank = t;
  if (f.horizon() > 1) rank -= count_deficient_upto(t, n, cells);
  const u128 idx = horizon_offset(n, f.horizon()) + rank;
  if (idx > std::numeric_limits<std::uint64_t>::max()) {
    throw SizeError("code index does not fit in 64 bits");
  }
  return static_cast<std::uint64_t>(idx);
}

std::uint64_t codes_with_horizon(std::uint32_t alphabet_size, std::size_t r) {
  if (r < 1) return 0;
  const u128 s = block_size(Alphabet(alphabet_size).size(), r);
  return s > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                       : static_cast<std::uint64_t>(s);
}

std::uint64_t eligible_code_count(std::uint32_t alphabet_size, std::uint64_t max_ordinal,
                                  double horizon_cap) {
  const Alphabet alphabet(alphabet_size);
  if (max_ordinal == 0 || !(horizon_cap >= 1.0)) return 0;
  const double capped = std::min(horizon_cap, 64.0);
  const auto r_max = static_cast<std::size_t>(std::floor(capped));
  // Codes with horizon <= r_max occupy indices [0, horizon_offset(r_max + 1)).
  const u128 within_cap = horizon_offset(alphabet.size(), r_max + 1);
  return static_cast<std::uint64_t>(std::min<u128>(within_cap, max_ordinal));
}

std::vector<SlidingBlockCode> eligible_codes(std::uint32_t alphabet_size,
                                             std::uint64_t max_ordinal, double horizon_cap) {
  const Alphabet alphabet(alphabet_size);
  std::vector<SlidingBlockCode> out;
  const std::uint64_t limit = eligible_code_count(alphabet_size, max_ordinal, horizon_cap);
  if (limit > (std::uint64_t{1} << 20)) {
    throw SizeError("eligible code family would hold more than 2^20 codes");
  }
  out.reserve(static_cast<std::size_t>(limit));
  for (std::uint64_t i = 0; i < limit; ++i) {
    out.push_back(code_from_index(i, alphabet.size()));
  }
  return out;
}

std::string block_to_string(const SymbolBlock& block) {
  std::string s;
  if (block.alphabet().size() <= 10) {
    s.reserve(block.length());
    for (Symbol x : block.symbols()) s.push_back(static_cast<char>('0' + x));
    return s;
  }
  for (std::size_t i = 0; i < block.length(); ++i) {
    if (i > 0) s.push_back(',');
    s += std::to_string(block[i]);
  }
  return s;
}

}  // namespace subshift
