#include "soficopt/occupation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "soficopt/errors.hpp"

namespace soficopt {

OccupationMeasure::OccupationMeasure(std::shared_ptr<const EdgeGraph> graph,
                                     std::vector<Rat> weights)
    : graph_(std::move(graph)), weights_(std::move(weights)) {
  if (static_cast<int>(weights_.size()) != graph_->num_edges())
    throw std::runtime_error("weight vector size mismatch");
  Rat total(0);
  for (const auto& w : weights_) {
    if (w < 0) throw std::runtime_error("occupation weight is negative");
    total += w;
  }
  if (total != 1) throw std::runtime_error("occupation weights must sum to 1");
  for (int v = 0; v < graph_->num_vertices(); ++v) {
    Rat in(0), out(0);
    for (int e : graph_->in_edges(v)) in += weights_[e];
    for (int e : graph_->out_edges(v)) out += weights_[e];
    if (in != out)
      throw std::runtime_error("occupation flow is unbalanced at a vertex");
  }
}

bool OccupationMeasure::operator==(const OccupationMeasure& o) const {
  return graph_.get() == o.graph_.get() && weights_ == o.weights_;
}

OccupationMeasure occupation_of_cycle(const Cycle& c,
                                      std::shared_ptr<const EdgeGraph> g) {
  auto path = cycle_edge_path(*g, c);
  std::vector<long> counts(g->num_edges(), 0);
  for (int e : path) ++counts[e];
  std::vector<Rat> w(g->num_edges(), Rat(0));
  Rat len(static_cast<long>(path.size()));
  for (int e = 0; e < g->num_edges(); ++e)
    if (counts[e]) w[e] = Rat(counts[e]) / len;
  return OccupationMeasure(std::move(g), std::move(w));
}

RatVec integrate(const OccupationMeasure& m, const LocallyConstantFn& g) {
  return integrate(m, lift_to_edges(g, m.graph()));
}

RatVec integrate(const OccupationMeasure& m, const EdgeLift& lift) {
  RatVec out(lift.dimension, Rat(0));
  for (int e = 0; e < m.graph().num_edges(); ++e) {
    if (m.weight(e) == 0) continue;
    for (int c = 0; c < lift.dimension; ++c)
      out[c] += m.weight(e) * lift.values[e][c];
  }
  return out;
}

OccupationMeasure convex_combine(const std::vector<OccupationMeasure>& parts,
                                 const std::vector<Rat>& lambda) {
  if (parts.empty() || parts.size() != lambda.size())
    throw std::runtime_error("convex_combine arity mismatch");
  Rat total(0);
  for (const auto& l : lambda) {
    if (l < 0) throw std::runtime_error("negative combination weight");
    total += l;
  }
  if (total != 1) throw std::runtime_error("combination weights must sum to 1");
  const auto g = parts[0].graph_ptr();
  for (const auto& p : parts)
    if (p.graph_ptr().get() != g.get())
      throw std::runtime_error("convex_combine graph mismatch");
  std::vector<Rat> w(g->num_edges(), Rat(0));
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (int e = 0; e < g->num_edges(); ++e)
      if (parts[i].weight(e) != 0) w[e] += lambda[i] * parts[i].weight(e);
  return OccupationMeasure(g, std::move(w));
}

Rat cylinder_frequency(const OccupationMeasure& m, const Word& u) {
  const EdgeGraph& g = m.graph();
  if (static_cast<int>(u.size()) > g.order() + 1)
    throw std::runtime_error("cylinder word longer than block length");
  Rat out(0);
  for (int e = 0; e < g.num_edges(); ++e)
    if (is_prefix(u, g.edge(e).word)) out += m.weight(e);
  return out;
}

bool weakstar_close(const OccupationMeasure& m1, const OccupationMeasure& m2,
                    const TestFamily& F) {
  if (m1.graph_ptr().get() != m2.graph_ptr().get())
    throw std::runtime_error("weakstar_close graph mismatch");
  if (F.functions.empty() || F.radius <= 0)
    throw std::runtime_error("test family needs functions and radius > 0");
  for (const auto& f : F.functions) {
    RatVec a = integrate(m1, f);
    RatVec b = integrate(m2, f);
    for (std::size_t c = 0; c < a.size(); ++c)
      if (rat_abs(a[c] - b[c]) >= F.radius) return false;
  }
  return true;
}

ConvexCombo flow_decompose(const OccupationMeasure& m) {
  const EdgeGraph& g = m.graph();
  std::vector<Rat> w = m.weights();
  ConvexCombo combo;

  auto least_supported_vertex = [&]() {
    for (int v = 0; v < g.num_vertices(); ++v)
      for (int e : g.out_edges(v))
        if (w[e] > 0) return v;
    return -1;
  };

  while (true) {
    int start = least_supported_vertex();
    if (start < 0) break;
    // walk max-weight outgoing supported edges until a vertex repeats
    std::vector<int> visit_pos(g.num_vertices(), -1);
    std::vector<int> path;  // edges
    int v = start;
    while (visit_pos[v] < 0) {
      visit_pos[v] = static_cast<int>(path.size());
      int best = -1;
      for (int e : g.out_edges(v)) {
        if (w[e] <= 0) continue;
        if (best < 0 || w[e] > w[best]) best = e;  // ties: first in sorted order
      }
      if (best < 0) throw InternalError("balanced flow lost its outgoing support");
      path.push_back(best);
      v = g.edge(best).to;
    }
    // cycle = path[visit_pos[v] ..]
    std::vector<int> cyc(path.begin() + visit_pos[v], path.end());
    Rat bottleneck = w[cyc[0]];
    for (int e : cyc) bottleneck = std::min(bottleneck, w[e]);
    for (int e : cyc) w[e] -= bottleneck;
    Word word;
    word.reserve(cyc.size());
    for (int e : cyc) word.push_back(g.edge(e).word[0]);
    Cycle cycle = make_cycle(word);
    Rat lam = bottleneck * Rat(static_cast<long>(cyc.size()));
    // merge equal cycles so the list stays duplicate-free
    bool merged = false;
    for (std::size_t i = 0; i < combo.cycles.size(); ++i)
      if (combo.cycles[i] == cycle) {
        combo.weights[i] += lam;
        merged = true;
        break;
      }
    if (!merged) {
      combo.cycles.push_back(cycle);
      combo.weights.push_back(lam);
    }
  }
  return combo;
}

OccupationMeasure combo_to_occupation(const ConvexCombo& combo,
                                      std::shared_ptr<const EdgeGraph> g) {
  std::vector<OccupationMeasure> parts;
  parts.reserve(combo.cycles.size());
  for (const auto& c : combo.cycles) parts.push_back(occupation_of_cycle(c, g));
  return convex_combine(parts, combo.weights);
}

OccupationMeasure parse_occupation(std::istream& in,
                                   std::shared_ptr<const EdgeGraph> g) {
  std::string line;
  int lineno = 0;
  std::optional<int> order;
  std::vector<Rat> w(g->num_edges(), Rat(0));
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "order") {
      int L;
      if (!(ls >> L)) fail("missing order");
      if (L != g->order()) fail("occupation order does not match the session graph");
      order = L;
    } else if (key == "edge") {
      if (!order) fail("edge before order");
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (static_cast<int>(toks.size()) != g->order() + 2)
        fail("edge line needs L+1 symbols and a rational");
      Word word;
      for (int i = 0; i < g->order() + 1; ++i) {
        auto idx = g->alphabet().index_of(toks[i]);
        if (!idx) fail("symbol not in alphabet: " + toks[i]);
        word.push_back(*idx);
      }
      auto r = parse_rational(toks.back());
      if (!r) fail("bad rational: " + toks.back());
      auto es = g->edges_with_word(word);
      if (es.empty()) fail("no such edge: " + format_word(g->alphabet(), word));
      if (es.size() > 1)
        fail("edge word is ambiguous on this sofic graph; occupation files "
             "require word-keyed graphs");
      w[es[0]] = *r;
    } else {
      fail("unknown directive: " + key);
    }
  }
  lineno = 0;
  if (!order) throw ParseError("missing order line");
  try {
    return OccupationMeasure(std::move(g), std::move(w));
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid occupation: ") + e.what());
  }
}

OccupationMeasure parse_occupation_file(const std::string& path,
                                        std::shared_ptr<const EdgeGraph> g) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open occupation file: " + path);
  return parse_occupation(in, std::move(g));
}

void write_occupation(std::ostream& out, const OccupationMeasure& m) {
  const EdgeGraph& g = m.graph();
  out << "order " << g.order() << "\n";
  for (int e = 0; e < g.num_edges(); ++e) {
    if (m.weight(e) == 0) continue;
    if (g.edges_with_word(g.edge(e).word).size() > 1)
      throw std::runtime_error(
          "occupation not representable: several edges share a block word");
    out << "edge " << format_word(g.alphabet(), g.edge(e).word) << " "
        << format_rational(m.weight(e)) << "\n";
  }
}

}  // namespace soficopt
