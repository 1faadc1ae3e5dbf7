#include "soficopt/edge_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "soficopt/errors.hpp"
#include "soficopt/follower.hpp"

namespace soficopt {

Cycle make_cycle(const Word& w) {
  if (w.empty()) throw std::runtime_error("cycle word must be non-empty");
  return Cycle{canonical_cycle_word(w)};
}

EdgeGraph::EdgeGraph(std::shared_ptr<const ShiftPresentation> shift, int order,
                     std::vector<EgVertex> vertices, std::vector<EgEdge> edges)
    : shift_(std::move(shift)),
      order_(order),
      vertices_(std::move(vertices)),
      edges_(std::move(edges)) {
  out_.assign(vertices_.size(), {});
  in_.assign(vertices_.size(), {});
  for (int e = 0; e < num_edges(); ++e) {
    out_[edges_[e].from].push_back(e);
    in_[edges_[e].to].push_back(e);
    edges_by_word_[edges_[e].word].push_back(e);
  }
  for (int v = 0; v < num_vertices(); ++v)
    vertex_by_word_[vertices_[v].word].push_back(v);
}

int EdgeGraph::step(int v, int symbol) const {
  for (int e : out_[v])
    if (edges_[e].word.back() == symbol) return e;
  return -1;
}

std::optional<int> EdgeGraph::find_vertex(const Word& w, int state) const {
  auto it = vertex_by_word_.find(w);
  if (it == vertex_by_word_.end()) return std::nullopt;
  for (int v : it->second)
    if (vertices_[v].state == state) return v;
  return std::nullopt;
}

std::vector<int> EdgeGraph::edges_with_word(const Word& w) const {
  auto it = edges_by_word_.find(w);
  if (it == edges_by_word_.end()) return {};
  return it->second;
}

bool EdgeGraph::strongly_connected() const {
  int n = num_vertices();
  if (n == 0) return false;
  auto bfs = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      const auto& nb = forward ? out_[v] : in_[v];
      for (int e : nb) {
        int t = forward ? edges_[e].to : edges_[e].from;
        if (!seen[t]) {
          seen[t] = 1;
          ++cnt;
          q.push_back(t);
        }
      }
    }
    return cnt == n;
  };
  return bfs(true) && bfs(false);
}

std::optional<std::vector<int>> EdgeGraph::shortest_path(int from, int to) const {
  if (from == to) return std::vector<int>{};
  std::vector<int> pred_edge(num_vertices(), -1);
  std::vector<char> seen(num_vertices(), 0);
  std::deque<int> q{from};
  seen[from] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int e : out_[v]) {
      int t = edges_[e].to;
      if (!seen[t]) {
        seen[t] = 1;
        pred_edge[t] = e;
        if (t == to) {
          std::vector<int> path;
          int cur = to;
          while (cur != from) {
            path.push_back(pred_edge[cur]);
            cur = edges_[pred_edge[cur]].from;
          }
          std::reverse(path.begin(), path.end());
          return path;
        }
        q.push_back(t);
      }
    }
  }
  return std::nullopt;
}

namespace {

/// Keeps only vertices lying in non-trivial strongly connected components
/// (a self-loop counts). For irreducible shifts there must be exactly one
/// such component; several would indicate a presentation this construction
/// cannot serve, so that is reported rather than silently mishandled.
void restrict_to_recurrent(std::vector<EgVertex>& vertices,
                           std::vector<EgEdge>& edges, bool irreducible) {
  int n = static_cast<int>(vertices.size());
  // Tarjan SCC
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (to, edge)
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    adj[edges[e].from].push_back({edges[e].to, e});
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on(n, 0);
  int counter = 0, ncomp = 0;
  // iterative Tarjan
  struct Frame {
    int v;
    std::size_t ei;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = 1;
    while (!frames.empty()) {
      auto& f = frames.back();
      if (f.ei < adj[f.v].size()) {
        int w = adj[f.v][f.ei].first;
        ++f.ei;
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          frames.push_back({w, 0});
        } else if (on[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == idx[v]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on[w] = 0;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
      }
    }
  }
  std::vector<char> nontrivial(ncomp, 0);
  for (const auto& e : edges)
    if (comp[e.from] == comp[e.to]) nontrivial[comp[e.from]] = 1;
  int kept_comps = 0;
  for (int c = 0; c < ncomp; ++c)
    if (nontrivial[c]) ++kept_comps;
  if (kept_comps == 0) throw ParseError("shift has no periodic points at this order");
  if (irreducible && kept_comps > 1)
    throw InternalError(
        "irreducible sofic shift produced several recurrent components");

  std::vector<int> remap(n, -1);
  std::vector<EgVertex> nv;
  for (int v = 0; v < n; ++v)
    if (nontrivial[comp[v]]) {
      remap[v] = static_cast<int>(nv.size());
      nv.push_back(vertices[v]);
    }
  std::vector<EgEdge> ne;
  for (auto& e : edges)
    if (remap[e.from] >= 0 && remap[e.to] >= 0 && comp[e.from] == comp[e.to])
      ne.push_back({remap[e.from], remap[e.to], e.word});
  vertices = std::move(nv);
  edges = std::move(ne);
}

void sort_graph(std::vector<EgVertex>& vertices, std::vector<EgEdge>& edges) {
  std::vector<int> vorder(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) vorder[i] = static_cast<int>(i);
  std::sort(vorder.begin(), vorder.end(), [&](int a, int b) {
    if (vertices[a].word != vertices[b].word) return vertices[a].word < vertices[b].word;
    return vertices[a].state < vertices[b].state;
  });
  std::vector<int> vrank(vertices.size());
  std::vector<EgVertex> nv(vertices.size());
  for (std::size_t i = 0; i < vorder.size(); ++i) {
    vrank[vorder[i]] = static_cast<int>(i);
    nv[i] = vertices[vorder[i]];
  }
  for (auto& e : edges) {
    e.from = vrank[e.from];
    e.to = vrank[e.to];
  }
  std::sort(edges.begin(), edges.end(), [](const EgEdge& a, const EgEdge& b) {
    if (a.word != b.word) return a.word < b.word;
    if (a.from != b.from) return a.from < b.from;
    return a.to < b.to;
  });
  vertices = std::move(nv);
}

}  // namespace

std::shared_ptr<const EdgeGraph> edge_graph(
    std::shared_ptr<const ShiftPresentation> p, int L) {
  if (L < 1) throw std::runtime_error("edge graph order must be >= 1");
  const ShiftPresentation& sp = *p;
  std::vector<EgVertex> vertices;
  std::vector<EgEdge> edges;

  if (sp.is_sft() && L >= sp.sft_memory()) {
    // de Bruijn graph on allowed words; the state component is redundant
    std::vector<Word> vws;
    Word cur;
    // enumerate allowed L-words by DFS
    std::vector<std::pair<Word, int>> stack;  // (word, depth marker unused)
    std::function<void(Word&)> rec = [&](Word& w) {
      if (static_cast<int>(w.size()) == L) {
        vws.push_back(w);
        return;
      }
      for (int a = 0; a < sp.alphabet().size(); ++a) {
        w.push_back(a);
        if (is_allowed_word(sp, w)) rec(w);
        w.pop_back();
      }
    };
    rec(cur);
    std::map<Word, int> vindex;
    for (auto& w : vws) {
      vindex.emplace(w, static_cast<int>(vertices.size()));
      vertices.push_back({w, -1});
    }
    for (auto& [w, vi] : vindex) {
      for (int a = 0; a < sp.alphabet().size(); ++a) {
        Word ext = w;
        ext.push_back(a);
        if (!is_allowed_word(sp, ext)) continue;
        Word nxt(ext.begin() + 1, ext.end());
        auto it = vindex.find(nxt);
        if (it != vindex.end()) edges.push_back({vi, it->second, ext});
      }
    }
  } else {
    // (state, word) pairs; needed when memory exceeds L or the shift is
    // genuinely sofic
    std::map<std::pair<Word, int>, int> vindex;
    std::deque<std::pair<Word, int>> queue;
    // seeds: all states with all L-paths into them
    std::function<void(int, Word&, int)> seed = [&](int q, Word& w, int left) {
      if (left == 0) {
        auto key = std::make_pair(w, q);
        if (!vindex.count(key)) {
          vindex.emplace(key, -1);
          queue.push_back(key);
        }
        return;
      }
      for (int a = 0; a < sp.alphabet().size(); ++a) {
        int t = sp.trans(q, a);
        if (t < 0) continue;
        w.push_back(a);
        seed(t, w, left - 1);
        w.pop_back();
      }
    };
    for (int q = 0; q < sp.num_states(); ++q) {
      Word w;
      seed(q, w, L);
    }
    // close under successors
    std::set<std::pair<Word, int>> all(queue.begin(), queue.end());
    while (!queue.empty()) {
      auto [w, q] = queue.front();
      queue.pop_front();
      for (int a = 0; a < sp.alphabet().size(); ++a) {
        int t = sp.trans(q, a);
        if (t < 0) continue;
        Word nw(w.begin() + 1, w.end());
        nw.push_back(a);
        auto key = std::make_pair(nw, t);
        if (all.insert(key).second) queue.push_back(key);
      }
    }
    int idx = 0;
    for (auto& key : all) {
      vindex[key] = idx++;
      vertices.push_back({key.first, key.second});
    }
    for (auto& [key, vi] : vindex) {
      const auto& [w, q] = key;
      for (int a = 0; a < sp.alphabet().size(); ++a) {
        int t = sp.trans(q, a);
        if (t < 0) continue;
        Word nw(w.begin() + 1, w.end());
        nw.push_back(a);
        auto it = vindex.find({nw, t});
        if (it == vindex.end()) continue;
        Word eword = w;
        eword.push_back(a);
        edges.push_back({vi, it->second, eword});
      }
    }
    restrict_to_recurrent(vertices, edges, is_irreducible(sp));
  }

  if (vertices.empty()) throw ParseError("edge graph is empty");
  sort_graph(vertices, edges);
  return std::make_shared<EdgeGraph>(std::move(p), L, std::move(vertices),
                                     std::move(edges));
}

std::optional<std::vector<Cycle>> enumerate_cycles_capped(const EdgeGraph& g,
                                                          int max_len,
                                                          std::size_t cap) {
  if (max_len < 1) throw std::runtime_error("max_len must be >= 1");
  std::set<Word> seen;
  std::vector<Cycle> out;
  int n = g.num_vertices();
  std::vector<char> blocked(n, 0), onpath(n, 0);
  std::vector<int> path_edges;
  bool overflow = false;

  std::function<void(int, int)> dfs = [&](int start, int v) {
    if (overflow) return;
    for (int e : g.out_edges(v)) {
      int t = g.edge(e).to;
      if (t < start || blocked[t]) continue;
      if (t == start) {
        Word w;
        w.reserve(path_edges.size() + 1);
        for (int pe : path_edges) w.push_back(g.edge(pe).word[0]);
        w.push_back(g.edge(e).word[0]);
        Word canon = canonical_cycle_word(w);
        if (seen.insert(canon).second) {
          out.push_back(Cycle{canon});
          if (out.size() > cap) {
            overflow = true;
            return;
          }
        }
        continue;
      }
      if (onpath[t]) continue;
      if (static_cast<int>(path_edges.size()) + 2 > max_len) continue;
      onpath[t] = 1;
      path_edges.push_back(e);
      dfs(start, t);
      path_edges.pop_back();
      onpath[t] = 0;
      if (overflow) return;
    }
  };

  for (int s = 0; s < n && !overflow; ++s) {
    onpath[s] = 1;
    dfs(s, s);
    onpath[s] = 0;
    blocked[s] = 1;
  }
  if (overflow) return std::nullopt;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cycle> enumerate_cycles(const EdgeGraph& g, int max_len) {
  auto res = enumerate_cycles_capped(
      g, max_len, std::numeric_limits<std::size_t>::max());
  return std::move(*res);
}

std::vector<int> cycle_edge_path(const EdgeGraph& g, const Cycle& c) {
  const Word& w = c.word;
  std::size_t p = w.size();
  Word w0;
  for (int j = 0; j < g.order(); ++j) w0.push_back(w[j % p]);
  std::vector<int> candidates;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.vertex(v).word == w0) candidates.push_back(v);
  for (int start : candidates) {
    // Walk in rounds of p edges; the vertex seen at the start of a round
    // repeats within num_vertices+1 rounds, closing the path. On word-keyed
    // graphs the very first round closes.
    std::vector<int> round_start;
    std::vector<int> edges;
    int v = start;
    bool dead = false;
    for (int round = 0; round <= g.num_vertices() && !dead; ++round) {
      for (std::size_t j = 0; j < round_start.size(); ++j)
        if (round_start[j] == v)
          return std::vector<int>(edges.begin() + j * p, edges.end());
      round_start.push_back(v);
      for (std::size_t i = 0; i < p; ++i) {
        int sym = w[(i + g.order()) % p];
        int e = g.step(v, sym);
        if (e < 0) {
          dead = true;
          break;
        }
        edges.push_back(e);
        v = g.edge(e).to;
      }
    }
    if (!dead) {
      for (std::size_t j = 0; j < round_start.size(); ++j)
        if (round_start[j] == v)
          return std::vector<int>(edges.begin() + j * p, edges.end());
    }
  }
  throw std::runtime_error("cycle is not realizable in this edge graph");
}

int session_order(const ShiftPresentation& p, const std::vector<int>& fn_orders) {
  int L = 1;
  if (p.is_sft()) L = std::max(L, p.sft_memory());
  for (int k : fn_orders) L = std::max(L, k);
  return L;
}

}  // namespace soficopt
