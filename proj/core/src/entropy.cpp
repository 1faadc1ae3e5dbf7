#include "soficopt/entropy.hpp"

#include <cmath>
#include <stdexcept>

#include "soficopt/errors.hpp"

namespace soficopt {

double entropy(const OccupationMeasure& m) {
  const EdgeGraph& g = m.graph();
  double h = 0.0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    Rat s(0);
    for (int e : g.out_edges(v)) s += m.weight(e);
    if (s == 0) continue;
    for (int e : g.out_edges(v)) {
      if (m.weight(e) == 0) continue;
      Rat ratio = m.weight(e) / s;  // exact; ratio == 1 gives exactly 0
      if (ratio == 1) continue;
      h -= m.weight(e).get_d() * std::log(ratio.get_d());
    }
  }
  return h;
}

bool support_out_degree_one(const OccupationMeasure& m) {
  const EdgeGraph& g = m.graph();
  for (int v = 0; v < g.num_vertices(); ++v) {
    int supported = 0;
    for (int e : g.out_edges(v))
      if (m.weight(e) != 0) ++supported;
    if (supported > 1) return false;
  }
  return true;
}

namespace {

struct TiltedStationary {
  std::vector<double> edge_freq;
  double log_rho;
  bool ok;
};

/// Stationary edge frequencies of the entropy-maximizing Markov measure
/// for edge weights exp(theta . phi(e)), via power iteration on the
/// weighted adjacency operator.
TiltedStationary tilted_stationary(const EdgeGraph& g, const EdgeLift& phi,
                                   const std::vector<double>& theta) {
  int n = g.num_vertices();
  std::vector<double> eweight(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    double s = 0;
    for (int c = 0; c < phi.dimension; ++c)
      s += theta[c] * phi.values[e][c].get_d();
    eweight[e] = std::exp(s);
  }
  auto iterate = [&](bool right) {
    std::vector<double> x(n, 1.0), nx(n);
    double rho = 1.0;
    for (int it = 0; it < 20000; ++it) {
      std::fill(nx.begin(), nx.end(), 0.0);
      for (int e = 0; e < g.num_edges(); ++e) {
        int a = g.edge(e).from, b = g.edge(e).to;
        if (right)
          nx[a] += eweight[e] * x[b];
        else
          nx[b] += eweight[e] * x[a];
      }
      double norm = 0;
      for (double v : nx) norm += v;
      if (norm <= 0) return std::pair(std::vector<double>(), 0.0);
      for (auto& v : nx) v /= norm;
      double diff = 0;
      for (int i = 0; i < n; ++i) diff = std::max(diff, std::fabs(nx[i] - x[i]));
      x.swap(nx);
      rho = norm;
      if (diff < 1e-16 && it > 50) break;
    }
    return std::pair(x, rho);
  };
  auto [r, rho1] = iterate(true);
  auto [l, rho2] = iterate(false);
  TiltedStationary out;
  if (r.empty() || l.empty()) {
    out.ok = false;
    return out;
  }
  out.log_rho = std::log(rho1);
  out.edge_freq.assign(g.num_edges(), 0.0);
  double z = 0;
  for (int e = 0; e < g.num_edges(); ++e) {
    double v = l[g.edge(e).from] * eweight[e] * r[g.edge(e).to];
    out.edge_freq[e] = v;
    z += v;
  }
  for (auto& v : out.edge_freq) v /= z;
  out.ok = true;
  return out;
}

double markov_entropy_double(const EdgeGraph& g, const std::vector<double>& w) {
  int n = g.num_vertices();
  double h = 0;
  for (int v = 0; v < n; ++v) {
    double s = 0;
    for (int e : g.out_edges(v)) s += w[e];
    if (s <= 0) continue;
    for (int e : g.out_edges(v)) {
      if (w[e] <= 0) continue;
      h -= w[e] * std::log(w[e] / s);
    }
  }
  return h;
}

}  // namespace

MaxEntResult max_entropy_in_fiber(const EdgeGraph& g, const EdgeLift& phi,
                                  const std::optional<std::vector<double>>& h,
                                  double tol) {
  int d = phi.dimension;
  std::vector<double> theta(d, 0.0);
  MaxEntResult res;
  if (!h) {
    auto st = tilted_stationary(g, phi, theta);
    if (!st.ok) throw InfeasibleError("graph admits no stationary measure");
    res.weights = st.edge_freq;
    res.entropy = markov_entropy_double(g, res.weights);
    res.residual = 0.0;
    return res;
  }
  // minimize log rho(theta) - theta.h (convex); gradient is rv(theta) - h
  double step = 1.0;
  auto objective = [&](const std::vector<double>& th, TiltedStationary& st) {
    st = tilted_stationary(g, phi, th);
    if (!st.ok) return 1e300;
    double v = st.log_rho;
    for (int c = 0; c < d; ++c) v -= th[c] * (*h)[c];
    return v;
  };
  TiltedStationary st;
  double fcur = objective(theta, st);
  if (fcur >= 1e300) throw InfeasibleError("constraint fiber is empty");
  for (int it = 0; it < 5000; ++it) {
    std::vector<double> grad(d);
    double gnorm = 0;
    for (int c = 0; c < d; ++c) {
      double rv = 0;
      for (int e = 0; e < g.num_edges(); ++e)
        rv += st.edge_freq[e] * phi.values[e][c].get_d();
      grad[c] = rv - (*h)[c];
      gnorm = std::max(gnorm, std::fabs(grad[c]));
    }
    if (gnorm < tol) break;
    // backtracking line search on theta - step*grad
    while (step > 1e-14) {
      std::vector<double> cand(d);
      for (int c = 0; c < d; ++c) cand[c] = theta[c] - step * grad[c];
      TiltedStationary st2;
      double f2 = objective(cand, st2);
      if (f2 < fcur) {
        theta = cand;
        fcur = f2;
        st = st2;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (step <= 1e-14) break;
  }
  res.weights = st.edge_freq;
  res.entropy = markov_entropy_double(g, res.weights);
  res.residual = 0;
  for (int c = 0; c < d; ++c) {
    double rv = 0;
    for (int e = 0; e < g.num_edges(); ++e)
      rv += st.edge_freq[e] * phi.values[e][c].get_d();
    res.residual = std::max(res.residual, std::fabs(rv - (*h)[c]));
  }
  if (res.residual > std::max(tol * 100, 1e-6))
    throw InfeasibleError("constrained entropy maximization did not converge");
  return res;
}

}  // namespace soficopt
