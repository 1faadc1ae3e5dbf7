#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "soficopt/edge_graph.hpp"
#include "soficopt/rational.hpp"
#include "soficopt/shift.hpp"
#include "soficopt/word.hpp"

namespace soficopt {

/// A d-tuple of rational-valued functions of finitely many coordinates.
/// Coordinate i depends on the first order(i)+1 symbols.
class LocallyConstantFn {
 public:
  /// Tables map allowed words of length order+1 to values; a coordinate
  /// without a default must cover every allowed word of that length.
  LocallyConstantFn(std::shared_ptr<const ShiftPresentation> shift,
                    std::vector<int> orders,
                    std::vector<std::unordered_map<Word, Rat, WordHash>> tables,
                    std::vector<std::optional<Rat>> defaults);

  int dimension() const { return static_cast<int>(orders_.size()); }
  int order(int coord) const { return orders_[coord]; }
  int max_order() const;
  const ShiftPresentation& shift() const { return *shift_; }
  std::shared_ptr<const ShiftPresentation> shift_ptr() const { return shift_; }

  /// Value of coordinate `coord` on the point base^inf shifted by offset.
  Rat value_at(int coord, const Word& base, std::size_t offset) const;

  /// Value on a point starting with the given window (window must be at
  /// least order(coord)+1 long).
  Rat value_on(int coord, const Word& window) const;
  RatVec value_vec(const Word& window) const;

  /// Max of |value| over allowed words, per the sup norm on tables.
  Rat sup_norm() const { return sup_norm_; }

  /// Scalar helpers (dimension 1).
  static LocallyConstantFn indicator(std::shared_ptr<const ShiftPresentation> s,
                                     const Word& u);
  static LocallyConstantFn constant(std::shared_ptr<const ShiftPresentation> s,
                                    const RatVec& value);

 private:
  std::shared_ptr<const ShiftPresentation> shift_;
  std::vector<int> orders_;
  std::vector<std::unordered_map<Word, Rat, WordHash>> tables_;
  std::vector<std::optional<Rat>> defaults_;
  Rat sup_norm_;
};

LocallyConstantFn parse_potential(std::istream& in,
                                  std::shared_ptr<const ShiftPresentation> shift);
LocallyConstantFn parse_potential_text(const std::string& text,
                                       std::shared_ptr<const ShiftPresentation> shift);
LocallyConstantFn parse_potential_file(const std::string& path,
                                       std::shared_ptr<const ShiftPresentation> shift);

/// Exact Birkhoff sum: sum_{j=0}^{n-1} g(sigma^j(x^inf)).
RatVec birkhoff_sum(const LocallyConstantFn& g, const Word& x, std::size_t n);

/// birkhoff_sum(g, c.word, period) / period.
RatVec rotation_vector_of_cycle(const LocallyConstantFn& g, const Cycle& c);

/// Weights of g on the edges of G: the value of g on any point whose
/// initial window is the edge word. Requires G.order()+1 > max order.
struct EdgeLift {
  int dimension;
  std::vector<RatVec> values;  // [edge][coord]
};
EdgeLift lift_to_edges(const LocallyConstantFn& g, const EdgeGraph& G);

/// Occurrence counts of every length-`window_len` window over one period
/// of cyclic^inf.
std::unordered_map<Word, long, WordHash> window_counts(const Word& cyclic,
                                                       int window_len,
                                                       int alphabet_size);

}  // namespace soficopt
