#include "soficopt/optimizer.hpp"

#include <functional>

#include "soficopt/entropy.hpp"
#include "soficopt/errors.hpp"

namespace soficopt {

void fiber_constraint_rows(const EdgeGraph& g, const EdgeLift& phi,
                           const RatVec& h,
                           std::vector<std::vector<Rat>>& rows,
                           std::vector<Rat>& rhs) {
  int ne = g.num_edges();
  rows.clear();
  rhs.clear();
  rows.emplace_back(ne, Rat(1));
  rhs.emplace_back(1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    std::vector<Rat> row(ne, Rat(0));
    for (int e : g.out_edges(v)) row[e] += 1;
    for (int e : g.in_edges(v)) row[e] -= 1;
    rows.push_back(std::move(row));
    rhs.emplace_back(0);
  }
  for (int k = 0; k < phi.dimension; ++k) {
    std::vector<Rat> row(ne);
    for (int e = 0; e < ne; ++e) row[e] = phi.values[e][k];
    rows.push_back(std::move(row));
    rhs.push_back(h[k]);
  }
}

OptimizationResult beta(std::shared_ptr<const EdgeGraph> g, const EdgeLift& phi,
                        const RatVec& h, const EdgeLift& f) {
  if (f.dimension != 1) throw std::runtime_error("objective must be scalar");
  if (static_cast<int>(h.size()) != phi.dimension)
    throw std::runtime_error("h dimension mismatch");
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> rhs;
  fiber_constraint_rows(*g, phi, h, rows, rhs);
  std::vector<Rat> c(g->num_edges());
  for (int e = 0; e < g->num_edges(); ++e) c[e] = f.values[e][0];
  LpResult lp = solve_lp_max(rows, rhs, c);
  if (lp.status == LpStatus::Infeasible) throw InfeasibleError("h outside rotation set");
  if (lp.status != LpStatus::Optimal) throw InternalError("beta LP unbounded");
  OptimizationResult out{lp.value, OccupationMeasure(g, std::move(lp.x)),
                         lp.unique_vertex, 0.0, std::move(lp.dual)};
  out.maximizer_entropy = entropy(out.maximizer);
  return out;
}

Rat oracle_beta_cycles(const EdgeGraph& g, const LocallyConstantFn& phi,
                       const RatVec& h, const LocallyConstantFn& f, int max_len) {
  auto cycles = enumerate_cycles(g, max_len);
  if (cycles.empty()) throw InfeasibleError("no cycles");
  int n = static_cast<int>(cycles.size());
  int d = phi.dimension();
  LpBuilder lp(n);
  std::vector<RatVec> rv(n);
  for (int i = 0; i < n; ++i) {
    rv[i] = rotation_vector_of_cycle(phi, cycles[i]);
    RatVec fa = rotation_vector_of_cycle(f, cycles[i]);
    lp.set_objective(i, fa[0]);
  }
  lp.add_row(std::vector<Rat>(n, Rat(1)), RowSense::Eq, Rat(1));
  for (int k = 0; k < d; ++k) {
    std::vector<Rat> row(n);
    for (int i = 0; i < n; ++i) row[i] = rv[i][k];
    lp.add_row(row, RowSense::Eq, h[k]);
  }
  auto res = lp.solve();
  if (res.status != LpStatus::Optimal) throw InfeasibleError("h outside rotation set");
  return res.value;
}

EdgeLift add_lifts(const EdgeLift& a, const EdgeLift& b) {
  if (a.dimension != b.dimension || a.values.size() != b.values.size())
    throw std::runtime_error("lift dimension mismatch");
  EdgeLift out = a;
  for (std::size_t e = 0; e < out.values.size(); ++e)
    for (int k = 0; k < out.dimension; ++k) out.values[e][k] += b.values[e][k];
  return out;
}

std::vector<bool> tangency_check(std::shared_ptr<const EdgeGraph> g,
                                 const EdgeLift& phi, const RatVec& h,
                                 const EdgeLift& f, const OccupationMeasure& mu,
                                 const std::vector<EdgeLift>& probes) {
  RatVec hh = integrate(mu, phi);
  if (!ratvec_eq(hh, h)) throw InfeasibleError("measure is not in the fiber");
  Rat base = beta(g, phi, h, f).value;
  std::vector<bool> verdicts;
  verdicts.reserve(probes.size());
  for (const auto& p : probes) {
    Rat lhs = integrate(mu, p)[0];
    Rat rhs = beta(g, phi, h, add_lifts(f, p)).value - base;
    verdicts.push_back(lhs <= rhs);
  }
  return verdicts;
}

LocallyConstantFn sample_objective(std::shared_ptr<const ShiftPresentation> shift,
                                   int order, Prng& rng) {
  // enumerate allowed words of length order+1 in lexicographic order
  std::vector<Word> words;
  Word cur;
  std::function<void()> rec = [&]() {
    if (static_cast<int>(cur.size()) == order + 1) {
      words.push_back(cur);
      return;
    }
    for (int a = 0; a < shift->alphabet().size(); ++a) {
      cur.push_back(a);
      if (is_allowed_word(*shift, cur)) rec();
      cur.pop_back();
    }
  };
  rec();
  std::unordered_map<Word, Rat, WordHash> table;
  for (const auto& w : words) {
    Rat v(rng.uniform(-1000, 1000), 1000);
    v.canonicalize();
    table.emplace(w, v);
  }
  return LocallyConstantFn(std::move(shift), {order}, {std::move(table)},
                           {std::nullopt});
}

ExperimentReport genericity_experiment(std::shared_ptr<const EdgeGraph> g,
                                       const EdgeLift& phi, const RatVec& h,
                                       int trials, int order,
                                       std::uint64_t seed) {
  ExperimentReport rep;
  rep.order = order;
  rep.seed = seed;
  Prng rng(seed);
  for (int t = 0; t < trials; ++t) {
    LocallyConstantFn f = sample_objective(g->shift_ptr(), order, rng);
    auto res = beta(g, phi, h, lift_to_edges(f, *g));
    TrialRecord rec;
    rec.index = t;
    rec.beta_value = res.value;
    rec.optimal_face_unique = res.optimal_face_unique;
    rec.out_degree_one_support = support_out_degree_one(res.maximizer);
    rec.entropy = res.maximizer_entropy;
    int maxdeg = 0;
    for (int v = 0; v < g->num_vertices(); ++v) {
      int deg = 0;
      for (int e : g->out_edges(v))
        if (res.maximizer.weight(e) != 0) ++deg;
      maxdeg = std::max(maxdeg, deg);
    }
    rec.max_out_degree = maxdeg;
    if (rec.out_degree_one_support && rec.entropy == 0.0) ++rep.zero_entropy_exact;
    if (rec.entropy < 1e-9) ++rep.entropy_below_1e9;
    rep.trials.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace soficopt
