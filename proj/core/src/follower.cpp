#include "soficopt/follower.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace soficopt {

FollowerAutomaton::FollowerAutomaton(const Alphabet& a,
                                     std::vector<std::vector<int>> trans,
                                     int initial)
    : alphabet_(a), trans_(std::move(trans)), initial_(initial) {
  // states reachable via >= 1 symbol
  std::vector<char> seen(trans_.size(), 0);
  std::vector<int> stack;
  for (int s = 0; s < alphabet_.size(); ++s) {
    int t = trans_[initial_][s];
    if (t >= 0 && !seen[t]) {
      seen[t] = 1;
      stack.push_back(t);
    }
  }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int s = 0; s < alphabet_.size(); ++s) {
      int t = trans_[q][s];
      if (t >= 0 && !seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  for (int q = 0; q < num_states(); ++q)
    if (seen[q]) word_reachable_.push_back(q);
}

int FollowerAutomaton::walk(int state, const Word& w) const {
  int q = state;
  for (auto s : w) {
    if (q < 0) return -1;
    q = trans_[q][s];
  }
  return q;
}

bool FollowerAutomaton::accepts_forever(const Word& w) const {
  if (w.empty()) return false;
  int q = initial_;
  for (int i = 0; i <= num_states(); ++i) {
    q = walk(q, w);
    if (q < 0) return false;
  }
  return true;
}

std::vector<int> FollowerAutomaton::word_map(const Word& w) const {
  std::vector<int> m(num_states());
  for (int q = 0; q < num_states(); ++q) m[q] = walk(q, w);
  return m;
}

FollowerAutomaton follower_automaton(const ShiftPresentation& p) {
  int n = p.num_states();
  int k = p.alphabet().size();
  using Subset = std::vector<int>;
  Subset full(n);
  for (int i = 0; i < n; ++i) full[i] = i;

  std::map<Subset, int> index;
  std::vector<Subset> subsets{full};
  index[full] = 0;
  std::vector<std::vector<int>> trans;
  for (std::size_t q = 0; q < subsets.size(); ++q) {
    trans.emplace_back(k, -1);
    for (int a = 0; a < k; ++a) {
      std::set<int> img;
      for (int s : subsets[q]) {
        int t = p.trans(s, a);
        if (t >= 0) img.insert(t);
      }
      if (img.empty()) continue;
      Subset sub(img.begin(), img.end());
      auto it = index.find(sub);
      if (it == index.end()) {
        it = index.emplace(sub, static_cast<int>(subsets.size())).first;
        subsets.push_back(sub);
      }
      trans[q][a] = it->second;
    }
  }

  // merge states with equal follower sets (same domain of definedness)
  int m = static_cast<int>(subsets.size());
  std::vector<int> cls(m, 0);
  int ncls = 1;
  while (true) {
    std::map<std::vector<int>, int> sig_to_cls;
    std::vector<int> next(m);
    for (int q = 0; q < m; ++q) {
      std::vector<int> sig{cls[q]};
      for (int a = 0; a < k; ++a)
        sig.push_back(trans[q][a] < 0 ? -1 : cls[trans[q][a]]);
      auto it = sig_to_cls.find(sig);
      if (it == sig_to_cls.end())
        it = sig_to_cls.emplace(sig, static_cast<int>(sig_to_cls.size())).first;
      next[q] = it->second;
    }
    if (static_cast<int>(sig_to_cls.size()) == ncls) break;
    cls = std::move(next);
    ncls = static_cast<int>(sig_to_cls.size());
  }
  std::vector<std::vector<int>> merged(ncls, std::vector<int>(k, -1));
  for (int q = 0; q < m; ++q)
    for (int a = 0; a < k; ++a)
      if (trans[q][a] >= 0) merged[cls[q]][a] = cls[trans[q][a]];
  return FollowerAutomaton(p.alphabet(), std::move(merged), cls[0]);
}

bool is_synchronizing(const FollowerAutomaton& fa, const Word& u) {
  int target = fa.word_state(u);
  if (target < 0) throw std::runtime_error("word is not allowed");
  for (int s : fa.word_reachable_states()) {
    int img = fa.walk(s, u);
    if (img >= 0 && img != target) return false;
  }
  return true;
}

std::optional<int> uniform_sync_length(const FollowerAutomaton& fa, int bound) {
  int n = fa.num_states();
  int k = fa.alphabet().size();

  // Work with per-word transition profiles; distinct profiles are few even
  // when the number of words is large.
  auto sync_profile = [&](const StateMap& prof) {
    int target = prof[fa.initial()];
    if (target < 0) return true;  // word not allowed; vacuous at this level
    for (int s : fa.word_reachable_states()) {
      if (prof[s] >= 0 && prof[s] != target) return false;
    }
    return true;
  };

  std::vector<StateMap> symbol_maps(k);
  for (int a = 0; a < k; ++a) {
    symbol_maps[a].assign(n, -1);
    for (int q = 0; q < n; ++q) symbol_maps[a][q] = fa.step(q, a);
  }

  std::set<StateMap> level;
  for (int a = 0; a < k; ++a)
    if (symbol_maps[a][fa.initial()] >= 0) level.insert(symbol_maps[a]);

  for (int kappa = 1; kappa <= bound; ++kappa) {
    bool all_sync = true;
    for (const auto& prof : level)
      if (!sync_profile(prof)) {
        all_sync = false;
        break;
      }
    if (all_sync) return kappa;
    std::set<StateMap> next;
    for (const auto& prof : level)
      for (int a = 0; a < k; ++a) {
        StateMap comp = compose_maps(prof, symbol_maps[a]);
        if (comp[fa.initial()] >= 0) next.insert(std::move(comp));
      }
    level = std::move(next);
    if (level.empty()) return std::nullopt;  // no allowed words this long
  }
  return std::nullopt;
}

StateMap compose_maps(const StateMap& first, const StateMap& then) {
  StateMap out(first.size(), -1);
  for (std::size_t q = 0; q < first.size(); ++q) {
    int mid = first[q];
    out[q] = mid < 0 ? -1 : then[mid];
  }
  return out;
}

StateMap identity_map(int n) {
  StateMap m(n);
  for (int i = 0; i < n; ++i) m[i] = i;
  return m;
}

StateMap map_power(const StateMap& m, const Int& e) {
  if (e < 0) throw std::runtime_error("negative map power");
  StateMap result = identity_map(static_cast<int>(m.size()));
  StateMap base = m;
  Int k = e;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) result = compose_maps(result, base);
    base = compose_maps(base, base);
    k >>= 1;
  }
  return result;
}

}  // namespace soficopt
