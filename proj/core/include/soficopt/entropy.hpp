#pragma once

#include <optional>
#include <vector>

#include "soficopt/occupation.hpp"

namespace soficopt {

/// Markov entropy of the occupation vector:
///   -sum_e w(e) log(w(e)/s(src(e))),  0 log 0 = 0.
/// Exactly 0 when the support has out-degree one everywhere; an upper
/// bound for the entropy of every invariant measure with these edge
/// frequencies. The only floating-point quantity in the core.
double entropy(const OccupationMeasure& m);

/// True iff every supported vertex has exactly one supported outgoing
/// edge (the support carries a single Markov measure, a cycle measure).
bool support_out_degree_one(const OccupationMeasure& m);

/// Numerical helper, no exactness contract: approximately maximizes the
/// Markov entropy over the fiber {rv = h} (or over all occupations when h
/// is absent) by a Lagrangian tilt on the constraint coordinates.
struct MaxEntResult {
  std::vector<double> weights;  // per edge
  double entropy = 0.0;
  double residual = 0.0;  // max |rv - h| over coordinates
};

MaxEntResult max_entropy_in_fiber(const EdgeGraph& g, const EdgeLift& phi,
                                  const std::optional<std::vector<double>>& h,
                                  double tol);

}  // namespace soficopt
