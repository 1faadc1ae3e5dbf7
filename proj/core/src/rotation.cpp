#include "soficopt/rotation.hpp"

#include <algorithm>
#include <map>

#include "soficopt/errors.hpp"

namespace soficopt {

int rational_rank(std::vector<RatVec> rows) {
  if (rows.empty()) return 0;
  std::size_t cols = rows[0].size();
  int rank = 0;
  std::size_t col = 0;
  for (std::size_t r = 0; r < rows.size() && col < cols; ++col) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      Rat f = rows[i][col] / rows[r][col];
      for (std::size_t j = col; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

namespace {

/// Optimal vertex of the flow polytope under a linear objective on the
/// rotation coordinates, lexicographically refined so the projected point
/// is a unique vertex of the rotation set. Returns (rv, witnessing cycle).
std::pair<RatVec, Cycle> support_vertex(const EdgeGraph& g, const EdgeLift& phi,
                                        const RatVec& theta) {
  int ne = g.num_edges();
  int d = phi.dimension;
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> rhs;
  rows.emplace_back(ne, Rat(1));
  rhs.emplace_back(1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    std::vector<Rat> row(ne, Rat(0));
    for (int e : g.out_edges(v)) row[e] += 1;
    for (int e : g.in_edges(v)) row[e] -= 1;
    rows.push_back(std::move(row));
    rhs.emplace_back(0);
  }
  auto objective = [&](const RatVec& dir) {
    std::vector<Rat> c(ne, Rat(0));
    for (int e = 0; e < ne; ++e)
      for (int k = 0; k < d; ++k) c[e] += dir[k] * phi.values[e][k];
    return c;
  };
  LpResult res = solve_lp_max(rows, rhs, objective(theta));
  if (res.status != LpStatus::Optimal)
    throw std::runtime_error("edge graph has no cycles");
  // pin the projected optimum coordinate by coordinate
  for (int k = 0; k < d; ++k) {
    RatVec dir(d, Rat(0));
    std::vector<Rat> crow = objective(k == 0 ? theta : dir);
    if (k > 0) {
      RatVec prev(d, Rat(0));
      prev[k - 1] = 1;
      crow = objective(prev);
    } else {
      crow = objective(theta);
    }
    Rat value(0);
    for (int e = 0; e < ne; ++e) value += crow[e] * res.x[e];
    rows.push_back(crow);
    rhs.push_back(value);
    RatVec next(d, Rat(0));
    next[k] = 1;
    res = solve_lp_max(rows, rhs, objective(next));
    if (res.status != LpStatus::Optimal)
      throw InternalError("support refinement lost feasibility");
  }
  OccupationMeasure m(g.shift_ptr() ? nullptr : nullptr, {});  // placeholder
  (void)m;
  RatVec rv(d, Rat(0));
  for (int e = 0; e < ne; ++e)
    for (int k = 0; k < d; ++k) rv[k] += res.x[e] * phi.values[e][k];
  // the optimal face of the flow polytope has simple-cycle vertices
  std::vector<long> ignore;
  (void)ignore;
  return {rv, Cycle{}};
}

}  // namespace

RotationPolytope rotation_set(const EdgeGraph& g, const EdgeLift& phi) {
  if (g.num_edges() == 0) throw std::runtime_error("empty edge graph");
  auto cycles = enumerate_cycles_capped(g, g.num_vertices(), 4096);
  RotationPolytope r;
  r.dimension = phi.dimension;

  std::vector<RatVec> points;
  std::vector<Cycle> gens;
  if (cycles) {
    if (cycles->empty()) throw std::runtime_error("edge graph has no cycles");
    std::map<RatVec, Cycle> best_cycle;
    for (const auto& c : *cycles) {
      auto path = cycle_edge_path(g, c);
      RatVec rv(phi.dimension, Rat(0));
      for (int e : path)
        for (int k = 0; k < phi.dimension; ++k) rv[k] += phi.values[e][k];
      Rat len(static_cast<long>(path.size()));
      for (auto& v : rv) v /= len;
      best_cycle.emplace(rv, c);  // cycles arrive sorted; the first stays
    }
    for (auto& [rv, c] : best_cycle) {
      points.push_back(rv);
      gens.push_back(c);
    }
  } else {
    // too many simple cycles to enumerate: probe the rotation set with
    // support-function LPs over the flow polytope instead
    std::vector<std::pair<RatVec, Cycle>> found =
        rotation_support_probe(g, phi);
    for (auto& [rv, c] : found) {
      points.push_back(rv);
      gens.push_back(std::move(c));
    }
  }

  // keep extreme points only: p is redundant iff it lies in the hull of
  // the other candidates
  int n = static_cast<int>(points.size());
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    bool redundant = false;
    if (!others.empty()) {
      LpBuilder lp(static_cast<int>(others.size()));
      std::vector<Rat> ones(others.size(), Rat(1));
      lp.add_row(ones, RowSense::Eq, Rat(1));
      for (int k = 0; k < r.dimension; ++k) {
        std::vector<Rat> row(others.size());
        for (std::size_t t = 0; t < others.size(); ++t) row[t] = points[others[t]][k];
        lp.add_row(row, RowSense::Eq, points[i][k]);
      }
      redundant = lp.solve().status == LpStatus::Optimal;
    }
    if (!redundant) {
      r.vertices.push_back(points[i]);
      r.generating_cycles.push_back(gens[i]);
    }
  }
  return r;
}

bool hull_contains(const RotationPolytope& r, const RatVec& h) {
  if (static_cast<int>(h.size()) != r.dimension)
    throw std::runtime_error("dimension mismatch");
  int n = static_cast<int>(r.vertices.size());
  LpBuilder lp(n);
  lp.add_row(std::vector<Rat>(n, Rat(1)), RowSense::Eq, Rat(1));
  for (int k = 0; k < r.dimension; ++k) {
    std::vector<Rat> row(n);
    for (int j = 0; j < n; ++j) row[j] = r.vertices[j][k];
    lp.add_row(row, RowSense::Eq, h[k]);
  }
  return lp.solve().status == LpStatus::Optimal;
}

InteriorVerdict interior_certificate(const RotationPolytope& r, const RatVec& h) {
  if (static_cast<int>(h.size()) != r.dimension)
    throw std::runtime_error("dimension mismatch");
  int d = r.dimension;
  // full-dimensionality in R^d
  std::vector<RatVec> diffs;
  for (std::size_t i = 1; i < r.vertices.size(); ++i) {
    RatVec row(d);
    for (int k = 0; k < d; ++k) row[k] = r.vertices[i][k] - r.vertices[0][k];
    diffs.push_back(row);
  }
  if (rational_rank(diffs) < d)
    throw DegenerateGeometry(
        "rotation set is not full-dimensional; drop a redundant constraint "
        "coordinate");

  if (!hull_contains(r, h)) return {InteriorKind::Outside, std::nullopt};

  // directions e_1..e_d and -(e_1+...+e_d)
  std::vector<RatVec> dirs;
  for (int k = 0; k < d; ++k) {
    RatVec e(d, Rat(0));
    e[k] = 1;
    dirs.push_back(e);
  }
  dirs.emplace_back(d, Rat(-1));

  int n = static_cast<int>(r.vertices.size());
  Rat smax;
  bool first = true;
  for (const auto& dir : dirs) {
    // maximize s subject to sum a = 1, sum a v - s dir = h, a >= 0, s >= 0
    LpBuilder lp(n + 1);
    lp.set_objective(n, Rat(1));
    std::vector<Rat> ones(n + 1, Rat(1));
    ones[n] = 0;
    lp.add_row(ones, RowSense::Eq, Rat(1));
    for (int k = 0; k < d; ++k) {
      std::vector<Rat> row(n + 1);
      for (int j = 0; j < n; ++j) row[j] = r.vertices[j][k];
      row[n] = -dir[k];
      lp.add_row(row, RowSense::Eq, h[k]);
    }
    auto res = lp.solve();
    if (res.status != LpStatus::Optimal)
      throw InternalError("interior step LP failed on a member point");
    if (first || res.value < smax) smax = res.value;
    first = false;
  }
  if (smax == 0) return {InteriorKind::Boundary, std::nullopt};

  InteriorCertificate cert;
  cert.h = h;
  cert.delta = smax / 2;
  for (const auto& dir : dirs) {
    RatVec p(d);
    for (int k = 0; k < d; ++k) p[k] = h[k] + cert.delta * dir[k];
    cert.probes.push_back(p);
  }
  return {InteriorKind::Interior, cert};
}

OccupationMeasure fiber_sample(std::shared_ptr<const EdgeGraph> g,
                               const EdgeLift& phi, const RatVec& h) {
  const EdgeGraph& G = *g;
  int ne = G.num_edges();
  LpBuilder lp(ne);
  lp.add_row(std::vector<Rat>(ne, Rat(1)), RowSense::Eq, Rat(1));
  for (int v = 0; v < G.num_vertices(); ++v) {
    std::vector<Rat> row(ne, Rat(0));
    for (int e : G.out_edges(v)) row[e] += 1;
    for (int e : G.in_edges(v)) row[e] -= 1;
    lp.add_row(row, RowSense::Eq, Rat(0));
  }
  for (int k = 0; k < phi.dimension; ++k) {
    std::vector<Rat> row(ne);
    for (int e = 0; e < ne; ++e) row[e] = phi.values[e][k];
    lp.add_row(row, RowSense::Eq, h[k]);
  }
  auto res = lp.solve();
  if (res.status != LpStatus::Optimal)
    throw InfeasibleError("h outside rotation set");
  return OccupationMeasure(std::move(g), std::move(res.x));
}

}  // namespace soficopt
