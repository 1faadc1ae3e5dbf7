#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace soficopt {

using Rat = mpq_class;
using Int = mpz_class;

/// Vector of exact rationals; dimension is context-dependent (d for
/// constraint values, 1 for scalar objectives).
using RatVec = std::vector<Rat>;

/// Parses "p/q" or "p" with q > 0 after sign normalization. Returns
/// nullopt on malformed input or zero denominator.
std::optional<Rat> parse_rational(const std::string& text);

/// Renders canonical "p/q" (or "p" when the denominator is 1).
std::string format_rational(const Rat& q);

std::string format_ratvec(const RatVec& v);

/// Parses "r1,r2,...,rd" into a RatVec.
std::optional<RatVec> parse_ratvec(const std::string& text);

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

/// Largest power of two 2^-k (k >= 0) that is <= q. Requires q > 0.
Rat dyadic_floor(const Rat& q);

/// Smallest positive integer D with D*v integral for every entry.
Int common_denominator(const RatVec& v);

bool ratvec_eq(const RatVec& a, const RatVec& b);

/// Deterministic 64-bit PRNG (splitmix64). Used instead of <random>
/// distributions so that seeded runs are byte-identical across platforms.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t state_;
};

}  // namespace soficopt
