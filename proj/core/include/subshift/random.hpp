#pragma once

#include <cstdint>
#include <random>

namespace subshift {

// Uniform integer in [0, n) from a 64-bit engine by rejection. Unlike
// std::uniform_int_distribution the output is identical on every standard
// library, which the fixed-seed regression files rely on.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % n;
}

}  // namespace subshift
