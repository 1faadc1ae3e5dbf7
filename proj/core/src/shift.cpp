#include "soficopt/shift.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace soficopt {

namespace {

std::vector<Word> all_words_of_length(int alpha, int n) {
  std::vector<Word> out;
  Word cur(n, 0);
  while (true) {
    out.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[i] == alpha - 1) cur[i--] = 0;
    if (i < 0) break;
    ++cur[i];
  }
  if (n == 0) out = {Word{}};
  return out;
}

bool contains_forbidden_suffix(const Word& w,
                               const std::unordered_set<Word, WordHash>& forbidden,
                               std::size_t max_len) {
  for (std::size_t len = 1; len <= std::min(max_len, w.size()); ++len) {
    Word suf(w.end() - len, w.end());
    if (forbidden.count(suf)) return true;
  }
  return false;
}

}  // namespace

void ShiftPresentation::trim() {
  int n = num_states();
  std::vector<char> alive(n, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> indeg(n, 0), outdeg(n, 0);
    for (int q = 0; q < n; ++q) {
      if (!alive[q]) continue;
      for (int a = 0; a < alphabet_.size(); ++a) {
        int t = trans_[q][a];
        if (t >= 0 && alive[t]) {
          ++outdeg[q];
          ++indeg[t];
        }
      }
    }
    for (int q = 0; q < n; ++q) {
      if (alive[q] && (indeg[q] == 0 || outdeg[q] == 0)) {
        alive[q] = 0;
        changed = true;
      }
    }
  }
  // compact states
  std::vector<int> remap(n, -1);
  int m = 0;
  for (int q = 0; q < n; ++q)
    if (alive[q]) remap[q] = m++;
  if (m == 0) throw ParseError("empty shift after trimming");
  std::vector<std::vector<int>> nt(m, std::vector<int>(alphabet_.size(), -1));
  std::vector<Word> nw(m);
  for (int q = 0; q < n; ++q) {
    if (!alive[q]) continue;
    for (int a = 0; a < alphabet_.size(); ++a) {
      int t = trans_[q][a];
      nt[remap[q]][a] = (t >= 0 && alive[t]) ? remap[t] : -1;
    }
    if (!state_words_.empty()) nw[remap[q]] = state_words_[q];
  }
  trans_ = std::move(nt);
  if (!state_words_.empty()) state_words_ = std::move(nw);

  // drop symbols that appear on no surviving edge
  std::vector<char> used(alphabet_.size(), 0);
  for (const auto& row : trans_)
    for (int a = 0; a < alphabet_.size(); ++a)
      if (row[a] >= 0) used[a] = 1;
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    std::vector<std::string> toks;
    std::vector<int> symmap(alphabet_.size(), -1);
    for (int a = 0; a < alphabet_.size(); ++a) {
      if (used[a]) {
        symmap[a] = static_cast<int>(toks.size());
        toks.push_back(alphabet_.token(a));
      }
    }
    if (toks.empty()) throw ParseError("empty shift after trimming");
    Alphabet na(toks);
    std::vector<std::vector<int>> nt2(trans_.size(), std::vector<int>(na.size(), -1));
    for (std::size_t q = 0; q < trans_.size(); ++q)
      for (int a = 0; a < alphabet_.size(); ++a)
        if (symmap[a] >= 0) nt2[q][symmap[a]] = trans_[q][a];
    for (auto& w : state_words_)
      for (auto& s : w) s = symmap[s];
    alphabet_ = na;
    trans_ = std::move(nt2);
  }
}

void ShiftPresentation::merge_equivalent_states() {
  // Moore partition refinement: states are equivalent iff they have the
  // same defined symbols and their successors fall in equal classes.
  int n = num_states();
  std::vector<int> cls(n, 0);
  int ncls = 1;
  while (true) {
    std::map<std::vector<int>, int> sig_to_cls;
    std::vector<int> next(n);
    for (int q = 0; q < n; ++q) {
      std::vector<int> sig;
      sig.push_back(cls[q]);
      for (int a = 0; a < alphabet_.size(); ++a) {
        int t = trans_[q][a];
        sig.push_back(t < 0 ? -1 : cls[t]);
      }
      auto it = sig_to_cls.find(sig);
      if (it == sig_to_cls.end())
        it = sig_to_cls.emplace(sig, static_cast<int>(sig_to_cls.size())).first;
      next[q] = it->second;
    }
    int m = static_cast<int>(sig_to_cls.size());
    if (m == ncls) break;
    cls = std::move(next);
    ncls = m;
  }
  if (ncls == n) return;
  std::vector<std::vector<int>> nt(ncls, std::vector<int>(alphabet_.size(), -1));
  for (int q = 0; q < n; ++q)
    for (int a = 0; a < alphabet_.size(); ++a)
      if (trans_[q][a] >= 0) nt[cls[q]][a] = cls[trans_[q][a]];
  trans_ = std::move(nt);
  state_words_.clear();
}

void ShiftPresentation::finish_validation() {
  if (num_states() == 0) throw ParseError("empty shift after trimming");
}

ShiftPresentation ShiftPresentation::from_adjacency(
    Alphabet a, const std::vector<std::vector<int>>& m) {
  int n = a.size();
  if (static_cast<int>(m.size()) != n)
    throw ParseError("adjacency matrix must have one row per symbol");
  ShiftPresentation p;
  p.kind_ = ShiftKind::Adjacency;
  p.alphabet_ = a;
  p.sft_memory_ = 1;
  p.trans_.assign(n, std::vector<int>(n, -1));
  p.state_words_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m[i].size()) != n)
      throw ParseError("adjacency row has wrong length");
    p.state_words_[i] = Word{static_cast<std::int32_t>(i)};
    for (int j = 0; j < n; ++j) {
      if (m[i][j] != 0 && m[i][j] != 1) throw ParseError("adjacency entries must be 0/1");
      if (m[i][j] == 1) p.trans_[i][j] = j;
    }
  }
  p.trim();
  p.finish_validation();
  return p;
}

ShiftPresentation ShiftPresentation::from_forbidden(Alphabet a,
                                                    std::vector<Word> forbidden) {
  ShiftPresentation p;
  p.kind_ = ShiftKind::ForbiddenWords;
  p.alphabet_ = a;
  std::unordered_set<Word, WordHash> fset;
  std::size_t max_len = 0;
  for (auto& w : forbidden) {
    if (w.empty()) throw ParseError("forbidden word must be non-empty");
    max_len = std::max(max_len, w.size());
    fset.insert(w);
  }
  int m = fset.empty() ? 0 : static_cast<int>(max_len) - 1;
  p.sft_memory_ = m;

  auto words = all_words_of_length(a.size(), m);
  // keep only states that are themselves clean
  std::vector<Word> states;
  for (auto& w : words)
    if (!contains_forbidden_suffix(w, fset, max_len)) {
      bool clean = true;
      for (std::size_t i = 0; i < w.size() && clean; ++i)
        for (std::size_t len = 1; i + len <= w.size() && clean; ++len)
          if (fset.count(Word(w.begin() + i, w.begin() + i + len))) clean = false;
      if (clean) states.push_back(w);
    }
  std::map<Word, int> index;
  for (int i = 0; i < static_cast<int>(states.size()); ++i) index[states[i]] = i;
  p.trans_.assign(states.size(), std::vector<int>(a.size(), -1));
  p.state_words_ = states;
  for (int q = 0; q < static_cast<int>(states.size()); ++q) {
    for (int s = 0; s < a.size(); ++s) {
      Word ext = states[q];
      ext.push_back(s);
      if (contains_forbidden_suffix(ext, fset, max_len)) continue;
      Word nxt(ext.end() - m, ext.end());
      auto it = index.find(nxt);
      if (it != index.end()) p.trans_[q][s] = it->second;
    }
  }
  p.trim();
  p.finish_validation();
  return p;
}

ShiftPresentation ShiftPresentation::from_labeled_graph(
    Alphabet a, int num_states,
    const std::vector<std::tuple<int, int, std::int32_t>>& edges) {
  if (num_states <= 0) throw ParseError("labeled graph needs at least one state");
  ShiftPresentation p;
  p.kind_ = ShiftKind::LabeledGraph;
  p.alphabet_ = a;
  p.sft_memory_ = -1;
  p.trans_.assign(num_states, std::vector<int>(a.size(), -1));
  for (auto [from, to, label] : edges) {
    if (from < 0 || from >= num_states || to < 0 || to >= num_states)
      throw ParseError("edge endpoint out of range");
    if (label < 0 || label >= a.size()) throw ParseError("edge label out of range");
    if (p.trans_[from][label] >= 0)
      throw ParseError("labeled graph is not right-resolving: state " +
                       std::to_string(from) + " has two edges labeled " +
                       a.token(label));
    p.trans_[from][label] = to;
  }
  p.trim();
  p.merge_equivalent_states();
  p.trim();
  p.finish_validation();
  return p;
}

ShiftPresentation parse_shift(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<Alphabet> alpha;
  std::optional<std::string> type;
  std::vector<std::vector<int>> rows;
  std::vector<Word> forbidden;
  int num_states = -1;
  std::vector<std::tuple<int, int, std::int32_t>> edges;

  auto fail = [&](const std::string& msg) -> void {
    throw ParseError("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "alphabet") {
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (toks.empty()) fail("alphabet needs at least one token");
      try {
        alpha = Alphabet(toks);
      } catch (const std::exception& e) {
        fail(e.what());
      }
    } else if (key == "type") {
      std::string t;
      if (!(ls >> t)) fail("missing shift type");
      if (t != "adjacency" && t != "forbidden" && t != "graph")
        fail("unknown shift type: " + t);
      type = t;
    } else if (key == "row") {
      std::vector<int> row;
      int v;
      while (ls >> v) row.push_back(v);
      rows.push_back(row);
    } else if (key == "forbid") {
      if (!alpha) fail("forbid before alphabet");
      std::string rest;
      std::getline(ls, rest);
      try {
        Word w = parse_word(*alpha, rest);
        if (w.empty()) fail("empty forbidden word");
        forbidden.push_back(w);
      } catch (const std::exception& e) {
        fail(e.what());
      }
    } else if (key == "states") {
      if (!(ls >> num_states)) fail("missing state count");
    } else if (key == "edge") {
      if (!alpha) fail("edge before alphabet");
      int f, t;
      std::string lab;
      if (!(ls >> f >> t >> lab)) fail("edge needs <from> <to> <label>");
      auto idx = alpha->index_of(lab);
      if (!idx) fail("edge label not in alphabet: " + lab);
      edges.emplace_back(f, t, *idx);
    } else {
      fail("unknown directive: " + key);
    }
  }
  lineno = 0;
  if (!alpha) throw ParseError("missing alphabet line");
  if (!type) throw ParseError("missing type line");
  if (*type == "adjacency") return ShiftPresentation::from_adjacency(*alpha, rows);
  if (*type == "forbidden") return ShiftPresentation::from_forbidden(*alpha, forbidden);
  if (num_states < 0) throw ParseError("graph type needs a states line");
  return ShiftPresentation::from_labeled_graph(*alpha, num_states, edges);
}

ShiftPresentation parse_shift_text(const std::string& text) {
  std::istringstream in(text);
  return parse_shift(in);
}

ShiftPresentation parse_shift_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open shift file: " + path);
  return parse_shift(in);
}

bool is_allowed_word(const ShiftPresentation& p, const Word& u) {
  int n = p.num_states();
  std::vector<char> cur(n, 1);
  for (auto s : u) {
    if (s < 0 || s >= p.alphabet().size())
      throw std::runtime_error("symbol not in alphabet");
    std::vector<char> nxt(n, 0);
    bool any = false;
    for (int q = 0; q < n; ++q) {
      if (!cur[q]) continue;
      int t = p.trans(q, s);
      if (t >= 0) {
        nxt[t] = 1;
        any = true;
      }
    }
    if (!any) return false;
    cur = std::move(nxt);
  }
  return true;
}

bool is_irreducible(const ShiftPresentation& p) {
  int n = p.num_states();
  int k = p.alphabet().size();
  // reach[q][r]: r reachable from q by a (possibly empty) path
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int q = 0; q < n; ++q) {
    std::vector<int> stack{q};
    reach[q][q] = 1;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int a = 0; a < k; ++a) {
        int t = p.trans(cur, a);
        if (t >= 0 && !reach[q][t]) {
          reach[q][t] = 1;
          stack.push_back(t);
        }
      }
    }
  }
  // heads[a]: states entered by an a-labeled edge; tails[a]: states leaving
  std::vector<std::vector<int>> heads(k), tails(k);
  for (int q = 0; q < n; ++q)
    for (int a = 0; a < k; ++a) {
      int t = p.trans(q, a);
      if (t >= 0) {
        heads[a].push_back(t);
        tails[a].push_back(q);
      }
    }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      bool ok = false;
      for (int h : heads[i]) {
        for (int t : tails[j])
          if (reach[h][t]) {
            ok = true;
            break;
          }
        if (ok) break;
      }
      if (!ok) return false;
    }
  return true;
}

}  // namespace soficopt
