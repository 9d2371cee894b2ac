#include "subshift/sequences.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "subshift/errors.hpp"

namespace subshift {

std::string Provenance::describe() const {
  switch (kind) {
    case Kind::mobius:
      return "mobius";
    case Kind::bernoulli:
      return "bernoulli(" + std::to_string(seed) + ")";
    case Kind::file:
      return "file(" + path + ")";
    case Kind::values:
      break;
  }
  return "values";
}

AperiodicSequence::AperiodicSequence(std::vector<double> values, Provenance provenance)
    : values_(std::move(values)), provenance_(std::move(provenance)) {
  if (values_.empty()) throw ArgumentError("sequence must have length >= 1");
  prefix_.resize(values_.size() + 1);
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= -1.0 && v <= 1.0)) {
      std::ostringstream os;
      os << "sequence value y_" << i + 1 << " = " << v << " outside [-1, 1]";
      throw ArgumentError(os.str());
    }
    prefix_[i + 1] = prefix_[i] + v;
  }
}

double AperiodicSequence::at(std::size_t i) const {
  if (i < 1 || i > values_.size()) {
    throw RangeError("index " + std::to_string(i) + " outside [1, " +
                     std::to_string(values_.size()) + "]");
  }
  return values_[i - 1];
}

std::span<const double> AperiodicSequence::window(std::size_t first, std::size_t count) const {
  if (first < 1 || first - 1 > values_.size() || count > values_.size() - (first - 1)) {
    throw RangeError("window y_" + std::to_string(first) + ".." +
                     std::to_string(first + count - 1) + " exceeds prefix of length " +
                     std::to_string(values_.size()));
  }
  return std::span<const double>(values_).subspan(first - 1, count);
}

double AperiodicSequence::range_sum(std::size_t a, std::size_t b) const {
  if (a < 1 || b > values_.size() || a > b + 1) {
    throw RangeError("range [" + std::to_string(a) + ", " + std::to_string(b) +
                     "] invalid for prefix of length " + std::to_string(values_.size()));
  }
  return prefix_[b] - prefix_[a - 1];
}

AperiodicSequence mobius_sieve(std::size_t n_max, std::size_t limit) {
  if (n_max == 0) throw SizeError("mobius_sieve: n_max must be >= 1");
  if (n_max > limit) {
    throw SizeError("mobius_sieve: n_max = " + std::to_string(n_max) +
                    " exceeds the sieve budget " + std::to_string(limit));
  }
  std::vector<std::int8_t> mu(n_max + 1, 0);
  std::vector<bool> composite(n_max + 1, false);
  std::vector<std::uint32_t> primes;
  mu[1] = 1;
  for (std::size_t i = 2; i <= n_max; ++i) {
    if (!composite[i]) {
      primes.push_back(static_cast<std::uint32_t>(i));
      mu[i] = -1;
    }
    for (std::uint32_t p : primes) {
      const std::size_t ip = i * p;
      if (ip > n_max) break;
      composite[ip] = true;
      if (i % p == 0) {
        mu[ip] = 0;
        break;
      }
      mu[ip] = static_cast<std::int8_t>(-mu[i]);
    }
  }
  std::vector<double> values(mu.begin() + 1, mu.end());
  return AperiodicSequence(std::move(values), Provenance{Provenance::Kind::mobius, 0, {}});
}

AperiodicSequence bernoulli_sequence(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw SizeError("bernoulli_sequence: n must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<double> values(n);
  for (auto& v : values) v = (gen() >> 63) != 0 ? 1.0 : -1.0;
  return AperiodicSequence(std::move(values), Provenance{Provenance::Kind::bernoulli, seed, {}});
}

AperiodicSequence load_sequence_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open sequence file " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  std::size_t blank_run = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      ++blank_run;
      continue;
    }
    if (blank_run > 0) {
      throw ArgumentError(path.string() + ":" + std::to_string(lineno - 1) + ": blank line");
    }
    auto last = line.find_last_not_of(" \t\r");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    if (*b == '+') ++b;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || std::isnan(v)) {
      throw ArgumentError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" +
                          line + "'");
    }
    if (v < -1.0 || v > 1.0) {
      throw ArgumentError(path.string() + ":" + std::to_string(lineno) + ": value " +
                          std::string(b, e) + " outside [-1, 1]");
    }
    values.push_back(v);
  }
  if (values.empty()) throw ArgumentError("sequence file " + path.string() + " is empty");
  return AperiodicSequence(std::move(values),
                           Provenance{Provenance::Kind::file, 0, path.string()});
}

void write_sequence_file(const AperiodicSequence& y, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write sequence file " + path.string());
  std::string buf;
  buf.reserve(y.length() * 3);
  char tmp[32];
  for (double v : y.values()) {
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    buf.append(tmp, ptr);
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

double ap_average(const AperiodicSequence& y, std::size_t t, std::size_t l, std::size_t n) {
  if (t < 1 || n < 1) throw ArgumentError("ap_average: t and n must be >= 1");
  if (n > (y.length() - std::min(l, y.length())) / t) {
    throw RangeError("ap_average: index n*t + l = " + std::to_string(n * t + l) +
                     " exceeds prefix length " + std::to_string(y.length()));
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += y[i * t + l];
  return sum / static_cast<double>(n);
}

std::vector<ApRow> aperiodicity_report(const AperiodicSequence& y, std::size_t t_max,
                                       std::span<const std::size_t> checkpoints) {
  if (t_max < 1) throw ArgumentError("aperiodicity_report: t_max must be >= 1");
  std::vector<ApRow> rows;
  for (std::size_t t = 1; t <= t_max; ++t) {
    for (std::size_t l = 0; l < t; ++l) {
      for (std::size_t n : checkpoints) {
        rows.push_back({t, l, n, std::abs(ap_average(y, t, l, n))});
      }
    }
  }
  return rows;
}

double interval_average(const AperiodicSequence& y, std::size_t a, std::size_t b) {
  if (a < 1 || a > b || b > y.length()) {
    throw ArgumentError("interval_average: need 1 <= a <= b <= " + std::to_string(y.length()) +
                        ", got a = " + std::to_string(a) + ", b = " + std::to_string(b));
  }
  return y.range_sum(a, b) / static_cast<double>(b - a + 1);
}

namespace {

// True iff every interval inside [1, m*L] of length >= L has |average| < eps.
// With S the prefix sums, an interval (u, v] violates iff
// S(v) - S(u) >= eps (v - u) or S(v) - S(u) <= -eps (v - u); both sides separate
// into a running extremum over u <= v - L.
bool threshold_holds(std::span<const long double> S, long double eps, std::size_t m,
                     std::size_t L) {
  const std::size_t n = m * L;
  long double min_p = INFINITY;
  long double max_q = -INFINITY;
  for (std::size_t v = L; v <= n; ++v) {
    const std::size_t u = v - L;
    const long double su = S[u];
    min_p = std::min(min_p, su - eps * static_cast<long double>(u));
    max_q = std::max(max_q, su + eps * static_cast<long double>(u));
    const long double sv = S[v];
    const long double pv = sv - eps * static_cast<long double>(v);
    const long double qv = sv + eps * static_cast<long double>(v);
    if (pv >= min_p || qv <= max_q) return false;
  }
  return true;
}

void check_estimator_args(double epsilon, std::size_t m, std::size_t L_max) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ArgumentError("estimate_L: epsilon must lie in (0, 1)");
  }
  if (m < 1 || L_max < 1) throw ArgumentError("estimate_L: m and L_max must be >= 1");
}

}  // namespace

std::optional<std::size_t> estimate_L_values(std::span<const double> z, double epsilon,
                                             std::size_t m, std::size_t L_max) {
  check_estimator_args(epsilon, m, L_max);
  if (L_max > z.size() / m) {
    throw ArgumentError("estimate_L: m * L_max = " + std::to_string(m * L_max) +
                        " exceeds available length " + std::to_string(z.size()));
  }
  const std::size_t n = m * L_max;
  std::vector<long double> S(n + 1);
  S[0] = 0.0L;
  for (std::size_t i = 0; i < n; ++i) S[i + 1] = S[i] + z[i];

  for (std::size_t L = L_max; L >= 1; --L) {
    if (!threshold_holds(S, epsilon, m, L)) {
      if (L == L_max) return std::nullopt;
      return L + 1;
    }
  }
  return std::size_t{1};
}

std::optional<std::size_t> estimate_L(const AperiodicSequence& y, double epsilon, std::size_t m,
                                      std::size_t L_max) {
  check_estimator_args(epsilon, m, L_max);
  if (L_max > y.length() / m) {
    throw ArgumentError("estimate_L: m * L_max = " + std::to_string(m * L_max) +
                        " exceeds prefix length " + std::to_string(y.length()));
  }
  return estimate_L_values(y.values().first(m * L_max), epsilon, m, L_max);
}

std::optional<std::size_t> estimate_L_progression(const AperiodicSequence& y, std::size_t step,
                                                  std::size_t offset, double epsilon,
                                                  std::size_t m, std::size_t L_max) {
  check_estimator_args(epsilon, m, L_max);
  if (step < 1) throw ArgumentError("estimate_L_progression: step must be >= 1");
  const std::size_t terms = m * L_max;
  if (offset > y.length() || terms > (y.length() - offset) / step) {
    throw ArgumentError("estimate_L_progression: progression term " +
                        std::to_string(terms * step + offset) + " exceeds prefix length " +
                        std::to_string(y.length()));
  }
  std::vector<double> z(terms);
  const auto values = y.values();
  for (std::size_t i = 1; i <= terms; ++i) z[i - 1] = values[i * step + offset - 1];
  return estimate_L_values(z, epsilon, m, L_max);
}

}  // namespace subshift
