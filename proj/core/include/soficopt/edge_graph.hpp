#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "soficopt/shift.hpp"
#include "soficopt/word.hpp"

namespace soficopt {

/// A periodic orbit, stored as the lexicographically least rotation of its
/// primitive word.
struct Cycle {
  Word word;
  std::size_t period() const { return word.size(); }

  bool operator==(const Cycle& o) const { return word == o.word; }
  bool operator<(const Cycle& o) const {
    if (word.size() != o.word.size()) return word.size() < o.word.size();
    return word < o.word;
  }
};

Cycle make_cycle(const Word& w);

struct EgVertex {
  Word word;  // length L
  int state;  // presentation state, or -1 on de Bruijn graphs
};

struct EgEdge {
  int from, to;
  Word word;  // length L+1
};

/// Higher-block presentation: vertices are allowed L-words (SFT inputs with
/// L at or above the memory) or (presentation-state, L-word) pairs (sofic
/// inputs), edges are allowed (L+1)-blocks.
class EdgeGraph {
 public:
  EdgeGraph(std::shared_ptr<const ShiftPresentation> shift, int order,
            std::vector<EgVertex> vertices, std::vector<EgEdge> edges);

  const ShiftPresentation& shift() const { return *shift_; }
  std::shared_ptr<const ShiftPresentation> shift_ptr() const { return shift_; }
  const Alphabet& alphabet() const { return shift_->alphabet(); }
  int order() const { return order_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const EgVertex& vertex(int i) const { return vertices_[i]; }
  const EgEdge& edge(int i) const { return edges_[i]; }
  const std::vector<int>& out_edges(int v) const { return out_[v]; }
  const std::vector<int>& in_edges(int v) const { return in_[v]; }

  /// Unique outgoing edge of v emitting `symbol` as the new last letter,
  /// or -1. Both graph flavors are deterministic in this sense.
  int step(int v, int symbol) const;

  std::optional<int> find_vertex(const Word& w, int state) const;

  /// Edges whose (L+1)-word equals w (singleton on de Bruijn graphs).
  std::vector<int> edges_with_word(const Word& w) const;

  bool strongly_connected() const;

  /// Shortest edge path between vertices (BFS, deterministic tie-breaks).
  /// Empty when from == to; nullopt when unreachable.
  std::optional<std::vector<int>> shortest_path(int from, int to) const;

 private:
  std::shared_ptr<const ShiftPresentation> shift_;
  int order_;
  std::vector<EgVertex> vertices_;
  std::vector<EgEdge> edges_;
  std::vector<std::vector<int>> out_, in_;
  std::unordered_map<Word, std::vector<int>, WordHash> vertex_by_word_;
  std::unordered_map<Word, std::vector<int>, WordHash> edges_by_word_;
};

/// Builds the order-L edge graph. L must be >= 1. SFT inputs with
/// L >= memory yield plain de Bruijn graphs; otherwise vertices carry the
/// presentation state.
std::shared_ptr<const EdgeGraph> edge_graph(
    std::shared_ptr<const ShiftPresentation> p, int L);

/// All simple cycles of G with length <= max_len, as canonical primitive
/// words, deduplicated across rotations and parallel state paths, sorted
/// by (period, word).
std::vector<Cycle> enumerate_cycles(const EdgeGraph& g, int max_len);

/// Same, but gives up (nullopt) once more than `cap` distinct cycles have
/// been collected.
std::optional<std::vector<Cycle>> enumerate_cycles_capped(const EdgeGraph& g,
                                                          int max_len,
                                                          std::size_t cap);

/// Edge path of one minimal period of c^inf through G, starting at the
/// lexicographically least vertex compatible with phase 0. The path length
/// is a multiple of c.period().
std::vector<int> cycle_edge_path(const EdgeGraph& g, const Cycle& c);

/// Session block order: max(1, SFT memory, orders of the given functions).
int session_order(const ShiftPresentation& p, const std::vector<int>& fn_orders);

}  // namespace soficopt
