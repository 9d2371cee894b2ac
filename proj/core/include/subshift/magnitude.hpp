#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace subshift {

// A positive quantity that may be astronomically large or small.
//
// Always carries log2 of the value. When the value is a non-negative integer
// that fits in 63 bits it also carries the exact integer; arithmetic keeps the
// exact part only while it stays representable.
class Magnitude {
 public:
  Magnitude() = default;

  static Magnitude exact(std::uint64_t v);
  static Magnitude from_log2(double log2);

  double log2() const { return log2_; }
  const std::optional<std::uint64_t>& exact_value() const { return exact_; }
  bool is_exact() const { return exact_.has_value(); }

  // The value as a double; may be +inf or 0 when out of double range.
  double value() const;

  // Exact integer or throws SizeError naming `what`.
  std::uint64_t require_exact(const char* what) const;

  Magnitude operator*(const Magnitude& other) const;
  Magnitude operator/(const Magnitude& other) const;

  std::string to_string() const;

 private:
  double log2_ = 0.0;
  std::optional<std::uint64_t> exact_ = std::uint64_t{1};
};

inline constexpr std::uint64_t kMaxExactMagnitude = std::uint64_t{1} << 63;

}  // namespace subshift
