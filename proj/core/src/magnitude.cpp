#include "subshift/magnitude.hpp"

#include <cmath>
#include <sstream>

#include "subshift/errors.hpp"

namespace subshift {

Magnitude Magnitude::exact(std::uint64_t v) {
  Magnitude m;
  m.log2_ = v == 0 ? -INFINITY : std::log2(static_cast<double>(v));
  if (v < kMaxExactMagnitude) {
    m.exact_ = v;
  } else {
    m.exact_.reset();
  }
  return m;
}

Magnitude Magnitude::from_log2(double log2) {
  Magnitude m;
  m.log2_ = log2;
  m.exact_.reset();
  return m;
}

double Magnitude::value() const {
  if (exact_) return static_cast<double>(*exact_);
  return std::exp2(log2_);
}

std::uint64_t Magnitude::require_exact(const char* what) const {
  if (!exact_) {
    std::ostringstream os;
    os << what << " = 2^" << log2_ << " does not fit in a 63-bit integer";
    throw SizeError(os.str());
  }
  return *exact_;
}

Magnitude Magnitude::operator*(const Magnitude& other) const {
  if (exact_ && other.exact_) {
    std::uint64_t p = 0;
    if (!__builtin_mul_overflow(*exact_, *other.exact_, &p) && p < kMaxExactMagnitude) return exact(p);
  }
  return from_log2(log2_ + other.log2_);
}

Magnitude Magnitude::operator/(const Magnitude& other) const {
  if (exact_ && other.exact_ && *other.exact_ != 0 && *exact_ % *other.exact_ == 0) {
    return exact(*exact_ / *other.exact_);
  }
  return from_log2(log2_ - other.log2_);
}

std::string Magnitude::to_string() const {
  std::ostringstream os;
  if (exact_) {
    os << *exact_;
  } else {
    os.precision(10);
    os << "2^" << log2_;
  }
  return os.str();
}

}  // namespace subshift
