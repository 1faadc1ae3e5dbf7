#pragma once

#include <optional>
#include <vector>

#include "soficopt/rational.hpp"
#include "soficopt/shift.hpp"
#include "soficopt/word.hpp"

namespace soficopt {

/// Deterministic automaton of follower sets, built by subset construction
/// from the presentation and merged so that two words reach the same state
/// iff their follower sets are equal. Every state is accepting; a word is
/// allowed iff reading it from the initial state never dies.
class FollowerAutomaton {
 public:
  FollowerAutomaton(const Alphabet& a, std::vector<std::vector<int>> trans,
                    int initial);

  const Alphabet& alphabet() const { return alphabet_; }
  int num_states() const { return static_cast<int>(trans_.size()); }
  int initial() const { return initial_; }

  /// -1 when the transition is undefined.
  int step(int state, int symbol) const { return trans_[state][symbol]; }

  /// State reached from `state` by reading w, or -1.
  int walk(int state, const Word& w) const;

  /// State of an allowed word read from the initial state, or -1.
  int word_state(const Word& u) const { return walk(initial_, u); }

  /// States reachable from the initial state by at least one symbol.
  const std::vector<int>& word_reachable_states() const { return word_reachable_; }

  /// True iff w^inf lies in the shift (reading w forever never dies).
  bool accepts_forever(const Word& w) const;

  /// Per-state image of reading w (-1 entries where reading dies).
  std::vector<int> word_map(const Word& w) const;

 private:
  Alphabet alphabet_;
  std::vector<std::vector<int>> trans_;
  int initial_;
  std::vector<int> word_reachable_;
};

FollowerAutomaton follower_automaton(const ShiftPresentation& p);

/// True iff F(vu) = F(u) for every allowed left extension v.
/// Throws std::runtime_error when u is not allowed.
bool is_synchronizing(const FollowerAutomaton& fa, const Word& u);

/// Smallest k <= bound such that every allowed word of length k is
/// synchronizing, or nullopt. Once some length works, all longer lengths
/// do (a word with a synchronizing suffix is synchronizing).
std::optional<int> uniform_sync_length(const FollowerAutomaton& fa, int bound);

/// Transition-map algebra used to certify very long concatenations
/// without materializing them: maps compose left to right, so
/// compose(f, g) is "read the f-word, then the g-word".
using StateMap = std::vector<int>;

StateMap compose_maps(const StateMap& first, const StateMap& then);
StateMap identity_map(int n);
StateMap map_power(const StateMap& m, const Int& e);

}  // namespace soficopt
