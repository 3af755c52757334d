#include "vcd/common.hpp"

#include <cmath>

namespace vcd {

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw DataError("empty rational");
  const auto bad = [&] { throw DataError("bad rational: '" + text + "'"); };
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  try {
    if (slash != std::string::npos) {
      const std::int64_t n = std::stoll(text.substr(0, slash));
      const std::int64_t d = std::stoll(text.substr(slash + 1));
      if (d <= 0 || n < 0) bad();
      return Rational(n, d);
    }
    if (dot != std::string::npos) {
      const std::string whole = text.substr(0, dot);
      const std::string frac = text.substr(dot + 1);
      if (frac.empty() || frac.size() > 9) bad();
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      const std::int64_t w = whole.empty() ? 0 : std::stoll(whole);
      const std::int64_t f = std::stoll(frac);
      if (w < 0 || f < 0) bad();
      return Rational(w * den + f, den);
    }
    const std::int64_t n = std::stoll(text);
    if (n < 0) bad();
    return Rational(n, 1);
  } catch (const std::logic_error&) {
    bad();
  }
  return Rational(0, 1);  // unreachable
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace vcd
