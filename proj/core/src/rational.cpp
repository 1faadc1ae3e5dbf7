#include "soficopt/rational.hpp"

#include <sstream>

namespace soficopt {

std::optional<Rat> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::string num = text, den = "1";
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
    if (num.empty() || den.empty()) return std::nullopt;
  }
  auto is_int = [](const std::string& s) {
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  if (!is_int(num) || !is_int(den)) return std::nullopt;
  mpq_class q;
  if (q.set_str(num + "/" + den, 10) != 0) return std::nullopt;
  if (q.get_den() == 0) return std::nullopt;
  q.canonicalize();
  return q;
}

std::string format_rational(const Rat& q) { return q.get_str(); }

std::string format_ratvec(const RatVec& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ",";
    out << format_rational(v[i]);
  }
  return out.str();
}

std::optional<RatVec> parse_ratvec(const std::string& text) {
  RatVec out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    // allow surrounding spaces
    std::size_t a = cur.find_first_not_of(" \t");
    std::size_t b = cur.find_last_not_of(" \t");
    if (a == std::string::npos) return std::nullopt;
    auto r = parse_rational(cur.substr(a, b - a + 1));
    if (!r) return std::nullopt;
    out.push_back(*r);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

Rat dyadic_floor(const Rat& q) {
  Rat p(1);
  if (q >= 1) return p;
  while (p > q) p /= 2;
  return p;
}

Int common_denominator(const RatVec& v) {
  Int d = 1;
  for (const auto& q : v) {
    Int den = q.get_den();
    Int g;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), den.get_mpz_t());
    d = d / g * den;
  }
  return d;
}

bool ratvec_eq(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

std::uint64_t Prng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t Prng::uniform(std::int64_t lo, std::int64_t hi) {
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());  // full range
  // rejection sampling for an unbiased draw
  std::uint64_t limit = ~0ULL - (~0ULL % span);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

}  // namespace soficopt
