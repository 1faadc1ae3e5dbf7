#pragma once

#include <iosfwd>
#include <set>
#include <vector>

#include "soficopt/errors.hpp"
#include "soficopt/word.hpp"

namespace soficopt {

enum class ShiftKind { Adjacency, ForbiddenWords, LabeledGraph };

/// A subshift given by a right-resolving labeled graph. Adjacency and
/// forbidden-word inputs are compiled to their canonical memory-m graph at
/// parse time; labeled-graph inputs are validated, trimmed and
/// follower-merged. Every state of the stored graph lies on a bi-infinite
/// path.
class ShiftPresentation {
 public:
  ShiftKind kind() const { return kind_; }
  const Alphabet& alphabet() const { return alphabet_; }

  int num_states() const { return static_cast<int>(trans_.size()); }

  /// trans(q, a) = successor state, or -1 when the edge is absent.
  int trans(int state, int symbol) const { return trans_[state][symbol]; }

  /// SFT memory (0 for a full shift); -1 for sofic labeled-graph inputs.
  int sft_memory() const { return sft_memory_; }
  bool is_sft() const { return sft_memory_ >= 0; }

  /// For SFT presentations, the memory word identifying each state.
  const Word& state_word(int state) const { return state_words_.at(state); }

  static ShiftPresentation from_adjacency(Alphabet a,
                                          const std::vector<std::vector<int>>& m);
  static ShiftPresentation from_forbidden(Alphabet a, std::vector<Word> forbidden);
  static ShiftPresentation from_labeled_graph(
      Alphabet a, int num_states,
      const std::vector<std::tuple<int, int, std::int32_t>>& edges);

 private:
  ShiftPresentation() = default;
  void trim();
  void merge_equivalent_states();
  void finish_validation();

  ShiftKind kind_ = ShiftKind::ForbiddenWords;
  Alphabet alphabet_;
  std::vector<std::vector<int>> trans_;  // [state][symbol] -> state or -1
  std::vector<Word> state_words_;        // SFT only
  int sft_memory_ = -1;
};

/// Parses the line-oriented shift file format ('#' starts a comment).
ShiftPresentation parse_shift(std::istream& in);
ShiftPresentation parse_shift_text(const std::string& text);
ShiftPresentation parse_shift_file(const std::string& path);

/// True iff u lies in the language of the presentation (the empty word is
/// always allowed). Throws if u uses an unknown symbol index.
bool is_allowed_word(const ShiftPresentation& p, const Word& u);

/// True iff every ordered symbol pair (i, j) is joined by some allowed
/// word i u j (u possibly empty).
bool is_irreducible(const ShiftPresentation& p);

}  // namespace soficopt
