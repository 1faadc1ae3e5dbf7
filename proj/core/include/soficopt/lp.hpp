#pragma once

#include <vector>

#include "soficopt/rational.hpp"

namespace soficopt {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rat value;
  std::vector<Rat> x;
  /// Multipliers for the equality rows (in the caller's row order):
  /// value = dual . b and c - dual . A <= 0 hold at an optimum.
  std::vector<Rat> dual;
  /// True when no non-basic structural column has zero reduced cost and a
  /// strictly positive ratio step, i.e. the optimal vertex is unique.
  bool unique_vertex = true;
};

/// maximize c.x  subject to  A x = b, x >= 0.
/// Exact rational two-phase simplex with Bland's anti-cycling rule and
/// lowest-index pivoting; fully deterministic.
LpResult solve_lp_max(const std::vector<std::vector<Rat>>& A,
                      const std::vector<Rat>& b, const std::vector<Rat>& c);

enum class RowSense { Eq, Le, Ge };

/// Convenience builder for mixed-sense rows over n non-negative variables.
class LpBuilder {
 public:
  explicit LpBuilder(int num_vars) : n_(num_vars), c_(num_vars, Rat(0)) {}

  void set_objective(int var, const Rat& coeff) { c_[var] = coeff; }
  void add_row(std::vector<Rat> coeffs, RowSense sense, Rat rhs);

  /// Solves max c.x; duals are reported per added row.
  LpResult solve() const;

  int num_vars() const { return n_; }

 private:
  int n_;
  std::vector<Rat> c_;
  std::vector<std::vector<Rat>> rows_;
  std::vector<RowSense> senses_;
  std::vector<Rat> rhs_;
};

}  // namespace soficopt
