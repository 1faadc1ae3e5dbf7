#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "soficopt/edge_graph.hpp"
#include "soficopt/lp.hpp"
#include "soficopt/occupation.hpp"
#include "soficopt/potential.hpp"

namespace soficopt {

/// V-representation of the rotation set: minimal vertex list plus one
/// witnessing cycle per vertex.
struct RotationPolytope {
  int dimension = 0;
  std::vector<RatVec> vertices;
  std::vector<Cycle> generating_cycles;
};

/// Exact convex hull of the rotation vectors of all simple cycles of G.
RotationPolytope rotation_set(const EdgeGraph& g, const EdgeLift& phi);

/// Exact membership of h in the hull (LP over vertex weights).
bool hull_contains(const RotationPolytope& r, const RatVec& h);

struct InteriorCertificate {
  RatVec h;
  Rat delta;                   // positive
  std::vector<RatVec> probes;  // h + delta e_i (i<=d), h - delta sum(e)
};

enum class InteriorKind { Interior, Boundary, Outside };

struct InteriorVerdict {
  InteriorKind kind;
  std::optional<InteriorCertificate> certificate;  // set iff Interior
};

/// Classifies h against the rotation set. Requires the hull to be
/// full-dimensional in R^d (throws DegenerateGeometry otherwise, e.g. for
/// constraint tuples whose hull lies in a proper affine subspace).
InteriorVerdict interior_certificate(const RotationPolytope& r, const RatVec& h);

/// An exact occupation measure with integrate(m, phi) = h, found by a
/// deterministic feasibility LP. Throws InfeasibleError when h is outside
/// the rotation set.
OccupationMeasure fiber_sample(std::shared_ptr<const EdgeGraph> g,
                               const EdgeLift& phi, const RatVec& h);

/// Exact rank of the matrix with the given rows (Gaussian elimination).
int rational_rank(std::vector<RatVec> rows);

}  // namespace soficopt
