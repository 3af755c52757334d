#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace vcd {

// Data or format problem in an input file or stream. Maps to CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed byte stream; carries the offset of the first offending byte.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : DataError(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Broken internal invariant or precondition. Maps to CLI exit code 4.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exact non-negative rational, kept reduced. Used for frame rates so that
// per-second index arithmetic and speed changes never drift.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den <= 0) throw InvariantError("rational denominator must be positive");
    if (num < 0) throw InvariantError("rational must be non-negative");
    reduce();
  }

  void reduce() {
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  bool positive() const noexcept { return num > 0; }
  double to_double() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  Rational operator*(const Rational& o) const {
    // Cross-reduce before multiplying to keep intermediates small.
    const std::int64_t g1 = std::gcd(num, o.den);
    const std::int64_t g2 = std::gcd(o.num, den);
    return Rational((num / g1) * (o.num / g2), (den / g2) * (o.den / g1));
  }

  bool operator==(const Rational& o) const noexcept {
    return num == o.num && den == o.den;
  }
  bool operator!=(const Rational& o) const noexcept { return !(*this == o); }

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }

  // Parses "24", "30000/1001" or a decimal such as "1.2" into the exact
  // rational (12/10 reduced to 6/5); never round-trips through a double.
  static Rational parse(const std::string& text);
};

// Deterministic random source used everywhere randomness is needed.
// mt19937_64 is bit-reproducible across platforms; the uniform and normal
// mappings are written out by hand because the standard distributions are
// not. One uniform draw consumes exactly one engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1): top 53 bits of the engine output.
  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  // Box-Muller; the second value of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(const std::string& text);

// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for one experiment cell: splitmix64(base ^ fnv1a64(tag)).
inline std::uint64_t derive_seed(std::uint64_t base, const std::string& tag) {
  return splitmix64(base ^ fnv1a64(tag));
}

}  // namespace vcd
