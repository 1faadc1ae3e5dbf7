#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "soficopt/edge_graph.hpp"
#include "soficopt/potential.hpp"
#include "soficopt/rational.hpp"

namespace soficopt {

/// Exact rational edge-frequency vector on an edge graph: non-negative,
/// total mass one, flow-balanced at every vertex.
class OccupationMeasure {
 public:
  OccupationMeasure(std::shared_ptr<const EdgeGraph> graph, std::vector<Rat> weights);

  const EdgeGraph& graph() const { return *graph_; }
  std::shared_ptr<const EdgeGraph> graph_ptr() const { return graph_; }
  const std::vector<Rat>& weights() const { return weights_; }
  const Rat& weight(int e) const { return weights_[e]; }

  bool operator==(const OccupationMeasure& o) const;

 private:
  std::shared_ptr<const EdgeGraph> graph_;
  std::vector<Rat> weights_;
};

struct ConvexCombo {
  std::vector<Cycle> cycles;
  std::vector<Rat> weights;
  bool nondegenerate = false;
};

struct TestFamily {
  std::vector<LocallyConstantFn> functions;  // all scalar
  Rat radius;                                // epsilon > 0
};

OccupationMeasure occupation_of_cycle(const Cycle& c, std::shared_ptr<const EdgeGraph> g);

RatVec integrate(const OccupationMeasure& m, const LocallyConstantFn& g);
RatVec integrate(const OccupationMeasure& m, const EdgeLift& lift);

OccupationMeasure convex_combine(const std::vector<OccupationMeasure>& parts,
                                 const std::vector<Rat>& lambda);

/// Total weight of edges whose block starts with u; |u| <= order+1.
Rat cylinder_frequency(const OccupationMeasure& m, const Word& u);

bool weakstar_close(const OccupationMeasure& m1, const OccupationMeasure& m2,
                    const TestFamily& F);

/// Greedy peeling into simple cycles: deterministic, at most one cycle per
/// support edge, and convex_combine of the result reproduces m exactly.
ConvexCombo flow_decompose(const OccupationMeasure& m);

OccupationMeasure combo_to_occupation(const ConvexCombo& combo,
                                      std::shared_ptr<const EdgeGraph> g);

/// Occupation file I/O ("order <L>" header plus "edge <w0> ... <wL> <p/q>"
/// lines). Only word-keyed (SFT de Bruijn) graphs round-trip through this
/// format; saving a measure on a state-augmented graph whose edge words
/// collide is an error.
OccupationMeasure parse_occupation(std::istream& in,
                                   std::shared_ptr<const EdgeGraph> g);
OccupationMeasure parse_occupation_file(const std::string& path,
                                        std::shared_ptr<const EdgeGraph> g);
void write_occupation(std::ostream& out, const OccupationMeasure& m);

}  // namespace soficopt
