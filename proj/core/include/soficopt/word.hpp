#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace soficopt {

/// Ordered finite list of distinct symbol tokens.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int i) const { return tokens_.at(i); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<int> index_of(const std::string& tok) const;

  bool operator==(const Alphabet& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Finite sequence of symbol indices over some Alphabet.
using Word = std::vector<std::int32_t>;

std::string format_word(const Alphabet& a, const Word& w);

/// Parses whitespace-separated tokens; throws std::runtime_error on an
/// unknown symbol.
Word parse_word(const Alphabet& a, const std::string& text);

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word word_power(const Word& w, std::size_t k);

/// w rotated left by r positions: w[r], w[r+1], ..., w[r-1].
Word rotate_word(const Word& w, std::size_t r);

/// Smallest period p dividing |w| with w = (prefix of length p)^k.
std::size_t primitive_period(const Word& w);

/// Lexicographically least rotation of the primitive root of w.
Word canonical_cycle_word(const Word& w);

bool is_prefix(const Word& pre, const Word& w);

struct WordHash {
  std::size_t operator()(const Word& w) const {
    std::size_t h = 1469598103934665603ULL;
    for (auto s : w) {
      h ^= static_cast<std::size_t>(s) + 0x9e3779b9;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace soficopt
