#include "soficopt/word.hpp"

#include <sstream>

namespace soficopt {

Alphabet::Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw std::runtime_error("alphabet must be non-empty");
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    const auto& t = tokens_[i];
    if (t.empty() || t.find_first_of(" \t\r\n") != std::string::npos)
      throw std::runtime_error("alphabet token contains whitespace");
    if (!index_.emplace(t, i).second)
      throw std::runtime_error("duplicate alphabet token: " + t);
  }
}

std::optional<int> Alphabet::index_of(const std::string& tok) const {
  auto it = index_.find(tok);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string format_word(const Alphabet& a, const Word& w) {
  std::ostringstream out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out << " ";
    out << a.token(w[i]);
  }
  return out.str();
}

Word parse_word(const Alphabet& a, const std::string& text) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto idx = a.index_of(tok);
    if (!idx) throw std::runtime_error("symbol not in alphabet: " + tok);
    w.push_back(*idx);
  }
  return w;
}

Word word_power(const Word& w, std::size_t k) {
  Word out;
  out.reserve(w.size() * k);
  for (std::size_t i = 0; i < k; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

Word rotate_word(const Word& w, std::size_t r) {
  if (w.empty()) return w;
  r %= w.size();
  Word out(w.begin() + r, w.end());
  out.insert(out.end(), w.begin(), w.begin() + r);
  return out;
}

std::size_t primitive_period(const Word& w) {
  // KMP failure function; the smallest period dividing |w|
  std::size_t n = w.size();
  if (n == 0) return 0;
  std::vector<std::size_t> fail(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = fail[i - 1];
    while (k > 0 && w[i] != w[k]) k = fail[k - 1];
    if (w[i] == w[k]) ++k;
    fail[i] = k;
  }
  std::size_t p = n - fail[n - 1];
  return (n % p == 0) ? p : n;
}

namespace {

// Booth's least-rotation algorithm, O(n)
std::size_t least_rotation(const Word& w) {
  std::size_t n = w.size();
  std::vector<std::ptrdiff_t> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    auto sj = w[j % n];
    std::ptrdiff_t i = f[j - k - 1];
    while (i != -1 && sj != w[(k + i + 1) % n]) {
      if (sj < w[(k + i + 1) % n]) k = j - i - 1;
      i = f[i];
    }
    if (sj != w[(k + i + 1) % n]) {
      if (sj < w[(k + i + 1) % n]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k;
}

}  // namespace

Word canonical_cycle_word(const Word& w) {
  std::size_t p = primitive_period(w);
  Word root(w.begin(), w.begin() + p);
  if (p <= 1) return root;
  return rotate_word(root, least_rotation(root));
}

bool is_prefix(const Word& pre, const Word& w) {
  if (pre.size() > w.size()) return false;
  for (std::size_t i = 0; i < pre.size(); ++i)
    if (pre[i] != w[i]) return false;
  return true;
}

}  // namespace soficopt
