#include "soficopt/potential.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "soficopt/errors.hpp"

namespace soficopt {

namespace {

void for_each_allowed_word(const ShiftPresentation& p, int len,
                           const std::function<void(const Word&)>& fn) {
  Word cur;
  std::function<void()> rec = [&]() {
    if (static_cast<int>(cur.size()) == len) {
      fn(cur);
      return;
    }
    for (int a = 0; a < p.alphabet().size(); ++a) {
      cur.push_back(a);
      if (is_allowed_word(p, cur)) rec();
      cur.pop_back();
    }
  };
  rec();
}

}  // namespace

LocallyConstantFn::LocallyConstantFn(
    std::shared_ptr<const ShiftPresentation> shift, std::vector<int> orders,
    std::vector<std::unordered_map<Word, Rat, WordHash>> tables,
    std::vector<std::optional<Rat>> defaults)
    : shift_(std::move(shift)),
      orders_(std::move(orders)),
      tables_(std::move(tables)),
      defaults_(std::move(defaults)) {
  if (orders_.empty() || orders_.size() != tables_.size() ||
      orders_.size() != defaults_.size())
    throw ParseError("inconsistent locally constant function data");
  sup_norm_ = 0;
  for (int c = 0; c < dimension(); ++c) {
    if (orders_[c] < 0) throw ParseError("negative order");
    for (const auto& [w, v] : tables_[c]) {
      if (static_cast<int>(w.size()) != orders_[c] + 1)
        throw ParseError("table word has wrong length");
      if (!is_allowed_word(*shift_, w))
        throw ParseError("table word is not allowed: " + format_word(shift_->alphabet(), w));
    }
    // every allowed word of the declared length must be covered
    bool missing = false;
    for_each_allowed_word(*shift_, orders_[c] + 1, [&](const Word& w) {
      const Rat* val = nullptr;
      auto it = tables_[c].find(w);
      if (it != tables_[c].end())
        val = &it->second;
      else if (defaults_[c])
        val = &*defaults_[c];
      if (!val) {
        missing = true;
        return;
      }
      Rat a = rat_abs(*val);
      if (a > sup_norm_) sup_norm_ = a;
    });
    if (missing) throw ParseError("missing table entry without default");
  }
}

int LocallyConstantFn::max_order() const {
  int m = 0;
  for (int k : orders_) m = std::max(m, k);
  return m;
}

Rat LocallyConstantFn::value_at(int coord, const Word& base,
                                std::size_t offset) const {
  int len = orders_[coord] + 1;
  Word window;
  window.reserve(len);
  for (int j = 0; j < len; ++j) window.push_back(base[(offset + j) % base.size()]);
  return value_on(coord, window);
}

Rat LocallyConstantFn::value_on(int coord, const Word& window) const {
  int len = orders_[coord] + 1;
  if (static_cast<int>(window.size()) < len)
    throw std::runtime_error("window too short for locally constant function");
  Word key(window.begin(), window.begin() + len);
  auto it = tables_[coord].find(key);
  if (it != tables_[coord].end()) return it->second;
  if (defaults_[coord]) return *defaults_[coord];
  throw InternalError("locally constant function evaluated off its table: " +
                      format_word(shift_->alphabet(), key));
}

RatVec LocallyConstantFn::value_vec(const Word& window) const {
  RatVec out(dimension());
  for (int c = 0; c < dimension(); ++c) out[c] = value_on(c, window);
  return out;
}

LocallyConstantFn LocallyConstantFn::indicator(
    std::shared_ptr<const ShiftPresentation> s, const Word& u) {
  if (u.empty()) throw std::runtime_error("indicator of the empty word");
  std::unordered_map<Word, Rat, WordHash> table;
  table.emplace(u, Rat(1));
  return LocallyConstantFn(std::move(s), {static_cast<int>(u.size()) - 1},
                           {std::move(table)}, {Rat(0)});
}

LocallyConstantFn LocallyConstantFn::constant(
    std::shared_ptr<const ShiftPresentation> s, const RatVec& value) {
  std::vector<int> orders(value.size(), 0);
  std::vector<std::unordered_map<Word, Rat, WordHash>> tables(value.size());
  std::vector<std::optional<Rat>> defaults;
  for (const auto& v : value) defaults.emplace_back(v);
  return LocallyConstantFn(std::move(s), std::move(orders), std::move(tables),
                           std::move(defaults));
}

LocallyConstantFn parse_potential(std::istream& in,
                                  std::shared_ptr<const ShiftPresentation> shift) {
  std::string line;
  int lineno = 0;
  std::optional<int> order;
  int d = -1;
  std::vector<std::unordered_map<Word, Rat, WordHash>> tables;
  std::vector<std::optional<Rat>> defaults;

  auto fail = [&](const std::string& msg) -> void {
    throw ParseError("line " + std::to_string(lineno) + ": " + msg);
  };
  auto parse_values = [&](const std::string& rhs) {
    RatVec vals;
    std::istringstream vs(rhs);
    std::string tok;
    while (vs >> tok) {
      auto r = parse_rational(tok);
      if (!r) fail("value not a rational p/q: " + tok);
      vals.push_back(*r);
    }
    if (vals.empty()) fail("missing values after ':'");
    if (d < 0) {
      d = static_cast<int>(vals.size());
      tables.resize(d);
      defaults.resize(d);
    } else if (static_cast<int>(vals.size()) != d) {
      fail("expected " + std::to_string(d) + " values");
    }
    return vals;
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "order") {
      int k;
      if (!(ls >> k) || k < 0) fail("order must be a non-negative integer");
      order = k;
    } else if (key == "value") {
      if (!order) fail("value before order");
      std::string rest;
      std::getline(ls, rest);
      auto colon = rest.find(':');
      if (colon == std::string::npos) fail("value line needs ':'");
      Word w;
      try {
        w = parse_word(shift->alphabet(), rest.substr(0, colon));
      } catch (const std::exception& e) {
        fail(e.what());
      }
      if (static_cast<int>(w.size()) != *order + 1)
        fail("word length must be order+1");
      if (!is_allowed_word(*shift, w))
        fail("word not allowed: " + format_word(shift->alphabet(), w));
      RatVec vals = parse_values(rest.substr(colon + 1));
      for (int c = 0; c < d; ++c)
        if (!tables[c].emplace(w, vals[c]).second) fail("duplicate value line");
    } else if (key == "default") {
      std::string rest;
      std::getline(ls, rest);
      auto colon = rest.find(':');
      if (colon == std::string::npos) fail("default line needs ':'");
      RatVec vals = parse_values(rest.substr(colon + 1));
      for (int c = 0; c < d; ++c) defaults[c] = vals[c];
    } else {
      fail("unknown directive: " + key);
    }
  }
  if (!order) throw ParseError("missing order line");
  if (d < 0) throw ParseError("potential file defines no values");
  std::vector<int> orders(d, *order);
  try {
    return LocallyConstantFn(std::move(shift), std::move(orders), std::move(tables),
                             std::move(defaults));
  } catch (const InternalError& e) {
    throw ParseError(e.what());
  }
}

LocallyConstantFn parse_potential_text(const std::string& text,
                                       std::shared_ptr<const ShiftPresentation> shift) {
  std::istringstream in(text);
  return parse_potential(in, std::move(shift));
}

LocallyConstantFn parse_potential_file(const std::string& path,
                                       std::shared_ptr<const ShiftPresentation> shift) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open potential file: " + path);
  return parse_potential(in, std::move(shift));
}

RatVec birkhoff_sum(const LocallyConstantFn& g, const Word& x, std::size_t n) {
  RatVec out(g.dimension(), Rat(0));
  if (x.empty() && n > 0) throw std::runtime_error("empty word");
  for (std::size_t j = 0; j < n; ++j)
    for (int c = 0; c < g.dimension(); ++c) out[c] += g.value_at(c, x, j);
  return out;
}

RatVec rotation_vector_of_cycle(const LocallyConstantFn& g, const Cycle& c) {
  const Word& w = c.word;
  std::size_t p = w.size();
  int maxlen = g.max_order() + 1;
  RatVec out(g.dimension(), Rat(0));
  if (p >= 64 && p > static_cast<std::size_t>(4 * maxlen)) {
    // count windows once, then one multiply per distinct window
    auto counts = window_counts(w, maxlen, g.shift().alphabet().size());
    for (const auto& [win, cnt] : counts)
      for (int cc = 0; cc < g.dimension(); ++cc)
        out[cc] += Rat(cnt) * g.value_on(cc, win);
  } else {
    out = birkhoff_sum(g, w, p);
  }
  for (auto& v : out) v /= Rat(static_cast<long>(p));
  return out;
}

EdgeLift lift_to_edges(const LocallyConstantFn& g, const EdgeGraph& G) {
  if (g.max_order() > G.order())
    throw std::runtime_error("edge graph order too small for this function");
  EdgeLift lift;
  lift.dimension = g.dimension();
  lift.values.resize(G.num_edges());
  for (int e = 0; e < G.num_edges(); ++e)
    lift.values[e] = g.value_vec(G.edge(e).word);
  return lift;
}

std::unordered_map<Word, long, WordHash> window_counts(const Word& cyclic,
                                                       int window_len,
                                                       int alphabet_size) {
  std::unordered_map<Word, long, WordHash> out;
  std::size_t p = cyclic.size();
  if (p == 0) return out;
  // packed rolling code when the window space is small
  double space = 1;
  for (int i = 0; i < window_len; ++i) space *= alphabet_size;
  if (space <= (1 << 22)) {
    std::size_t spc = static_cast<std::size_t>(space);
    std::vector<long> counts(spc, 0);
    std::size_t mod = spc / alphabet_size;
    std::size_t code = 0;
    for (int j = 0; j < window_len; ++j) code = code * alphabet_size + cyclic[j % p];
    for (std::size_t i = 0; i < p; ++i) {
      ++counts[code];
      code = (code % mod) * alphabet_size + cyclic[(i + window_len) % p];
    }
    for (std::size_t c = 0; c < spc; ++c) {
      if (!counts[c]) continue;
      Word w(window_len);
      std::size_t x = c;
      for (int j = window_len - 1; j >= 0; --j) {
        w[j] = static_cast<std::int32_t>(x % alphabet_size);
        x /= alphabet_size;
      }
      out.emplace(std::move(w), counts[c]);
    }
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      Word w(window_len);
      for (int j = 0; j < window_len; ++j) w[j] = cyclic[(i + j) % p];
      ++out[w];
    }
  }
  return out;
}

}  // namespace soficopt
