#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "soficopt/follower.hpp"
#include "soficopt/occupation.hpp"
#include "soficopt/potential.hpp"
#include "soficopt/rational.hpp"
#include "soficopt/rotation.hpp"

namespace soficopt {

/// All quantities of the corrective-word construction. The word
/// x = y z^(AR-1) is kept in run-length form; its length is often far too
/// large to materialize, and every verification works block-wise.
struct SynthesisPlan {
  std::shared_ptr<const ShiftPresentation> shift;
  std::shared_ptr<const LocallyConstantFn> phi;
  std::vector<std::shared_ptr<const LocallyConstantFn>> tracked;
  Word u;                    // shared synchronizing prefix
  std::vector<Word> blocks;  // a_1..a_{d+1}, u-prefixed, powered so ell < |a_i|
  std::vector<Rat> lambda;   // q_i / Q, positive, sum 1
  std::vector<Int> q;
  Int Q;
  int ell = 0;  // max word length any tracked function depends on

  RatVec h;  // sum lambda_i rv_phi(a_i)
  Rat epsilon;

  std::vector<RatVec> rv_phi;     // per block
  RatVec delta_phi;               // junction errors of the constraint
  std::vector<Rat> delta_f;       // per tracked scalar function
  std::vector<std::vector<Rat>> V;  // d x d, column j-1 = rv(a_last)-rv(a_j)
  std::vector<Int> v;
  Int R;
  Int A;
  Rat C;
  Rat delta_star;
  std::vector<Int> m_prime, M_prime, M;
  Int t;
  std::vector<Int> y_exponents, z_exponents;  // per block
  Int z_repeats;                              // AR - 1
  Int length;                                 // |x| = sum M_i |a_i|
};

/// Exact verification data for a realized plan. Birkhoff sums are
/// evaluated by block-wise window counting over one period of x^inf,
/// independent of the junction-error algebra that chose the exponents.
struct RealizedOrbit {
  std::optional<Word> x_word;    // u-aligned explicit word, when small
  std::optional<Cycle> x;        // canonical form of x_word
  Int length;                    // |x|
  OccupationMeasure occupation;  // of x^inf on the session graph
  RatVec rv;                     // exact rotation vector of the constraint
  RatVec birkhoff_phi;           // S_|x| phi, exact
  std::vector<Rat> birkhoff_tracked;   // S_|x| f per tracked function
  std::vector<Rat> tracked_integrals;  // S_|x| f / |x|
};

/// Window counts of the plan word x^inf, computed block-wise in exact
/// integer arithmetic; sums to |x|.
std::vector<std::pair<Word, Int>> plan_window_counts(const SynthesisPlan& p,
                                                     int window_len);

/// Explicit word of the plan; throws when longer than cap.
Word materialize_plan_word(const SynthesisPlan& p, std::size_t cap);

/// Verifies u is synchronizing, every block starts with u and has an
/// allowed periodic extension, concatenates the blocks with the given
/// exponents, and certifies the result (with periodic wrap) through the
/// follower automaton. Returns the concatenated word.
Word concat_check(const FollowerAutomaton& fa, const Word& u,
                  const std::vector<std::pair<Word, Int>>& blocks,
                  std::size_t cap = (std::size_t(1) << 26));

/// Exact lambda with sum 1 and sum lambda_i rv(c_i) = target for d+1
/// cycles whose rotation-vector differences span R^d. Throws
/// DegenerateGeometry on a rank-deficient configuration; when
/// require_interior is set, throws InfeasibleError unless every lambda_i
/// is strictly positive.
std::vector<Rat> recover_weights(const std::vector<Cycle>& cycles,
                                 const LocallyConstantFn& phi,
                                 const RatVec& target,
                                 bool require_interior = true);

/// delta_g = sum_k sum_{i<ell} g(sigma^{|a_k|-ell+i}(a_k a_{k+1}))
///                            - g(sigma^{|a_k|-ell+i}(a_k a_k)),
/// with the cyclic convention a_{last+1} = a_1. Requires ell < min |a_k|.
RatVec junction_errors(const LocallyConstantFn& g, const std::vector<Word>& blocks,
                       int ell);

/// Assembles the full plan: junction errors, V, v/R, A, C, delta*, the
/// corrective exponents and the minimal t >= 1 making the approximation
/// inequality hold with every block exponent >= 1.
SynthesisPlan build_plan(const FollowerAutomaton& fa, const Word& u,
                         std::vector<Word> cycle_words,
                         const std::vector<Rat>& lambda,
                         const LocallyConstantFn& phi,
                         const std::vector<LocallyConstantFn>& tracked,
                         const Rat& epsilon, const Int& t_ceiling = Int(1000000));

/// Certifies x through the follower automaton, computes its occupation
/// measure and exact rotation vector (which must equal plan.h), and checks
/// the tracked integrals against the lambda-combination within epsilon/2.
RealizedOrbit realize_plan(const SynthesisPlan& plan, const FollowerAutomaton& fa,
                           std::shared_ptr<const EdgeGraph> graph,
                           std::size_t materialize_cap = (std::size_t(1) << 22));

struct ExactRvTarget {
  const EdgeLift* phi = nullptr;
  RatVec target;  // must equal the exact rotation vector of y
};

/// A single cycle through u whose rotation vector and (L+1)-block
/// frequencies are within r of y. Built by quantizing y to integer edge
/// multiplicities, repairing flow balance by shortest paths, and (when an
/// exact target is supplied) repairing the rotation vector exactly by an
/// integer combination of simple cycles; the result is an Eulerian
/// circuit of the repaired multigraph. The quantization denominator
/// doubles until the r-bound is verified.
Cycle single_cycle_near(const OccupationMeasure& y, const Word& u, const Rat& r,
                        long initial_scale = (1L << 16),
                        const std::optional<ExactRvTarget>& exact = std::nullopt,
                        std::size_t length_cap = (std::size_t(1) << 25));

struct ApproximationRequest {
  OccupationMeasure nu;
  RatVec h;
  Rat epsilon;
  std::vector<LocallyConstantFn> test_family;
  std::vector<Rat> r_schedule;  // default 1/8, 1/16, ..., 1/1024
  Int t_ceiling = Int(1000000);
  std::size_t length_cap = (std::size_t(1) << 25);
};

struct ApproximationResult {
  SynthesisPlan plan;
  RealizedOrbit orbit;
  Word sync_word;
  Rat effective_epsilon;
  std::vector<Rat> lambda;
};

/// Theorem-level pipeline: picks a synchronizing word of maximal
/// nu-frequency, certifies h interior, builds periodic measures near the
/// perturbed fiber points with exact rotation vectors, recovers weights,
/// and realizes the corrective word. The output satisfies
/// rv(x) = h exactly and weakstar closeness to nu on the test family.
ApproximationResult approximate_in_fiber(const ApproximationRequest& req,
                                         const LocallyConstantFn& phi);

std::vector<Rat> default_r_schedule();

}  // namespace soficopt
