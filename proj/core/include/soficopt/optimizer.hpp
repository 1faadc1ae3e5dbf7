#pragma once

#include <memory>
#include <vector>

#include "soficopt/edge_graph.hpp"
#include "soficopt/lp.hpp"
#include "soficopt/occupation.hpp"
#include "soficopt/potential.hpp"
#include "soficopt/rational.hpp"

namespace soficopt {

struct OptimizationResult {
  Rat value;
  OccupationMeasure maximizer;
  bool optimal_face_unique = false;
  double maximizer_entropy = 0.0;
  /// Dual multipliers for the rows of fiber_constraint_rows, certifying
  /// value >= integral(f) over the whole fiber.
  std::vector<Rat> dual;
};

/// Constraint rows of the fiber LP, in the fixed order: total mass, one
/// balance row per vertex, one rotation row per constraint coordinate.
void fiber_constraint_rows(const EdgeGraph& g, const EdgeLift& phi,
                           const RatVec& h,
                           std::vector<std::vector<Rat>>& rows,
                           std::vector<Rat>& rhs);

/// Exact maximum of the f-integral over occupation measures with
/// rotation vector h. Throws InfeasibleError when the fiber is empty.
OptimizationResult beta(std::shared_ptr<const EdgeGraph> g, const EdgeLift& phi,
                        const RatVec& h, const EdgeLift& f);

/// Independent verification route: the same maximum computed as an exact
/// LP over simple-cycle weights (max_len should be >= the vertex count).
/// Rotation vectors and objective averages are evaluated by Birkhoff sums
/// on the cycle words, not through edge lifts.
Rat oracle_beta_cycles(const EdgeGraph& g, const LocallyConstantFn& phi,
                       const RatVec& h, const LocallyConstantFn& f, int max_len);

/// For each probe g: does integral(g, mu) <= beta(f+g) - beta(f) hold?
std::vector<bool> tangency_check(std::shared_ptr<const EdgeGraph> g,
                                 const EdgeLift& phi, const RatVec& h,
                                 const EdgeLift& f, const OccupationMeasure& mu,
                                 const std::vector<EdgeLift>& probes);

EdgeLift add_lifts(const EdgeLift& a, const EdgeLift& b);

struct TrialRecord {
  int index;
  Rat beta_value;
  bool optimal_face_unique;
  bool out_degree_one_support;
  int max_out_degree;
  double entropy;
};

struct ExperimentReport {
  std::vector<TrialRecord> trials;
  int zero_entropy_exact = 0;  // out-degree-1 support, entropy exactly 0
  int entropy_below_1e9 = 0;
  int order = 0;
  std::uint64_t seed = 0;
};

/// Samples `trials` objectives of the given order with numerators uniform
/// in [-1000, 1000] over denominator 1000 (deterministic seeded sampler),
/// maximizes each over the fiber, and tabulates entropy statistics.
ExperimentReport genericity_experiment(std::shared_ptr<const EdgeGraph> g,
                                       const EdgeLift& phi, const RatVec& h,
                                       int trials, int order,
                                       std::uint64_t seed);

/// The experiment's objective sampler, exposed for reproducibility tests.
LocallyConstantFn sample_objective(std::shared_ptr<const ShiftPresentation> shift,
                                   int order, Prng& rng);

}  // namespace soficopt
