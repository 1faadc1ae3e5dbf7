#include "soficopt/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "soficopt/entropy.hpp"
#include "soficopt/errors.hpp"
#include "soficopt/optimizer.hpp"

namespace soficopt {

namespace {

Int rat_floor(const Rat& q) {
  Int out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return out;
}

Int rat_ceil(const Rat& q) {
  Int out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return out;
}

Int exact_div(const Int& a, const Int& b, const char* what) {
  Int q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (r != 0) throw InternalError(std::string("non-integer division in ") + what);
  return q;
}

std::size_t int_to_size(const Int& v, std::size_t cap, const char* what) {
  if (v < 0 || v > Int(static_cast<unsigned long>(cap)))
    throw std::runtime_error(std::string(what) + " exceeds materialization cap");
  return static_cast<std::size_t>(v.get_ui());
}

bool cyclic_contains(const Word& w, const Word& u) {
  if (w.empty()) return u.empty();
  std::size_t reps = u.size() / w.size() + 2;
  Word big = word_power(w, reps);
  return std::search(big.begin(), big.end(), u.begin(), u.end()) != big.end();
}

/// Rotation of w (as a cyclic word) starting at an occurrence of u; the
/// result has length |w| and its periodic extension starts with u.
Word rotate_to_prefix(const Word& w, const Word& u) {
  std::size_t reps = u.size() / w.size() + 2;
  Word big = word_power(w, reps);
  auto it = std::search(big.begin(), big.end(), u.begin(), u.end());
  if (it == big.end()) throw std::runtime_error("cycle does not contain the prefix word");
  std::size_t r = static_cast<std::size_t>(it - big.begin()) % w.size();
  return rotate_word(w, r);
}

RatVec solve_square(const std::vector<std::vector<Rat>>& M, const RatVec& rhs) {
  int d = static_cast<int>(rhs.size());
  std::vector<std::vector<Rat>> a(d, std::vector<Rat>(d + 1));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a[i][j] = M[i][j];
    a[i][d] = rhs[i];
  }
  for (int col = 0; col < d; ++col) {
    int piv = -1;
    for (int i = col; i < d; ++i)
      if (a[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw DegenerateGeometry("rank-deficient matrix");
    std::swap(a[col], a[piv]);
    for (int i = 0; i < d; ++i) {
      if (i == col || a[i][col] == 0) continue;
      Rat f = a[i][col] / a[col][col];
      for (int j = col; j <= d; ++j) a[i][j] -= f * a[col][j];
    }
  }
  RatVec x(d);
  for (int i = 0; i < d; ++i) x[i] = a[i][d] / a[i][i];
  return x;
}

RatVec block_rotation_vector(const LocallyConstantFn& g, const Word& block) {
  RatVec s = birkhoff_sum(g, block, block.size());
  for (auto& v : s) v /= Rat(static_cast<long>(block.size()));
  return s;
}

}  // namespace

std::vector<Rat> default_r_schedule() {
  std::vector<Rat> sched;
  for (int k = 3; k <= 10; ++k) {
    Rat r(1, 1L << k);
    r.canonicalize();
    sched.push_back(r);
  }
  return sched;
}

Word concat_check(const FollowerAutomaton& fa, const Word& u,
                  const std::vector<std::pair<Word, Int>>& blocks,
                  std::size_t cap) {
  if (!is_synchronizing(fa, u))
    throw std::runtime_error("prefix word is not synchronizing");
  Int total(0);
  for (const auto& [w, e] : blocks) {
    if (w.empty() || e < 1) throw std::runtime_error("block needs a word and exponent >= 1");
    Word probe = word_power(w, u.size() / w.size() + 1);
    if (!is_prefix(u, probe))
      throw std::runtime_error("cycle word does not start with the shared prefix");
    if (!fa.accepts_forever(w))
      throw std::runtime_error("block has no allowed periodic extension");
    total += e * Int(static_cast<unsigned long>(w.size()));
  }
  std::size_t len = int_to_size(total, cap, "concatenation");
  Word out;
  out.reserve(len);
  for (const auto& [w, e] : blocks) {
    std::size_t reps = int_to_size(e, cap, "exponent");
    for (std::size_t k = 0; k < reps; ++k) out.insert(out.end(), w.begin(), w.end());
  }
  if (!fa.accepts_forever(out))
    throw InternalError("follower automaton rejected a synchronized concatenation");
  return out;
}

std::vector<Rat> recover_weights(const std::vector<Cycle>& cycles,
                                 const LocallyConstantFn& phi,
                                 const RatVec& target, bool require_interior) {
  int d = phi.dimension();
  if (static_cast<int>(cycles.size()) != d + 1)
    throw std::runtime_error("need exactly d+1 cycles");
  if (static_cast<int>(target.size()) != d)
    throw std::runtime_error("target dimension mismatch");
  std::vector<RatVec> rv(d + 1);
  for (int i = 0; i <= d; ++i) rv[i] = rotation_vector_of_cycle(phi, cycles[i]);
  // V column j = rv(last) - rv(j)
  std::vector<std::vector<Rat>> V(d, std::vector<Rat>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) V[i][j] = rv[d][i] - rv[j][i];
  RatVec rhs(d);
  for (int i = 0; i < d; ++i) rhs[i] = rv[d][i] - target[i];
  RatVec head = solve_square(V, rhs);  // throws DegenerateGeometry when singular
  std::vector<Rat> lambda(d + 1);
  Rat sum(0);
  for (int i = 0; i < d; ++i) {
    lambda[i] = head[i];
    sum += head[i];
  }
  lambda[d] = Rat(1) - sum;
  RatVec check(d, Rat(0));
  for (int i = 0; i <= d; ++i)
    for (int k = 0; k < d; ++k) check[k] += lambda[i] * rv[i][k];
  if (!ratvec_eq(check, target)) throw InternalError("weight recovery identity failed");
  if (require_interior)
    for (const auto& l : lambda)
      if (l <= 0) {
        std::ostringstream msg;
        msg << "target is not interior to the cycle simplex; lambda =";
        for (const auto& v : lambda) msg << " " << format_rational(v);
        throw InfeasibleError(msg.str());
      }
  return lambda;
}

RatVec junction_errors(const LocallyConstantFn& g, const std::vector<Word>& blocks,
                       int ell) {
  if (blocks.empty()) throw std::runtime_error("no blocks");
  for (const auto& b : blocks)
    if (static_cast<int>(b.size()) <= ell)
      throw std::runtime_error("ell must be smaller than every block length");
  RatVec delta(g.dimension(), Rat(0));
  int K = static_cast<int>(blocks.size());
  for (int k = 0; k < K; ++k) {
    const Word& a = blocks[k];
    const Word& b = blocks[(k + 1) % K];
    Word ab = concat(a, b);
    Word aa = concat(a, a);
    for (int i = 0; i < ell; ++i) {
      std::size_t off = a.size() - ell + i;
      for (int c = 0; c < g.dimension(); ++c)
        delta[c] += g.value_at(c, ab, off) - g.value_at(c, aa, off);
    }
  }
  return delta;
}

SynthesisPlan build_plan(const FollowerAutomaton& fa, const Word& u,
                         std::vector<Word> cycle_words,
                         const std::vector<Rat>& lambda,
                         const LocallyConstantFn& phi,
                         const std::vector<LocallyConstantFn>& tracked,
                         const Rat& epsilon, const Int& t_ceiling) {
  int d = phi.dimension();
  int K = d + 1;
  if (static_cast<int>(cycle_words.size()) != K)
    throw std::runtime_error("need d+1 cycle words");
  if (static_cast<int>(lambda.size()) != K)
    throw std::runtime_error("need d+1 weights");
  if (epsilon <= 0) throw std::runtime_error("epsilon must be positive");
  Rat lsum(0);
  for (const auto& l : lambda) {
    if (l <= 0) throw std::runtime_error("weights must be strictly positive");
    lsum += l;
  }
  if (lsum != 1) throw std::runtime_error("weights must sum to 1");
  if (!is_synchronizing(fa, u))
    throw std::runtime_error("prefix word is not synchronizing");

  SynthesisPlan p;
  p.shift = phi.shift_ptr();
  p.u = u;
  p.lambda = lambda;
  p.epsilon = epsilon;

  int ell = phi.max_order() + 1;
  for (const auto& f : tracked) {
    if (f.dimension() != 1)
      throw std::runtime_error("tracked functions must be scalar");
    ell = std::max(ell, f.max_order() + 1);
  }
  p.ell = ell;

  // power blocks until ell < |a_i| and the prefix fits
  std::size_t min_len = static_cast<std::size_t>(ell) + 1;
  min_len = std::max(min_len, u.size());
  for (auto& w : cycle_words) {
    if (w.empty()) throw std::runtime_error("empty cycle word");
    std::size_t k = (min_len + w.size() - 1) / w.size();
    if (k * w.size() == static_cast<std::size_t>(ell)) ++k;
    Word block = word_power(w, std::max<std::size_t>(1, k));
    while (block.size() <= static_cast<std::size_t>(ell))
      block.insert(block.end(), w.begin(), w.end());
    if (!is_prefix(u, block))
      throw std::runtime_error("cycle word does not start with the shared prefix");
    if (!fa.accepts_forever(block))
      throw std::runtime_error("cycle has no allowed periodic extension");
    p.blocks.push_back(std::move(block));
  }

  // q_i / Q
  RatVec lam(lambda.begin(), lambda.end());
  p.Q = common_denominator(lam);
  for (const auto& l : lambda) {
    Rat scaled = l * Rat(p.Q);
    if (scaled.get_den() != 1) throw InternalError("weight denominators out of sync");
    p.q.push_back(Int(scaled.get_num()));
  }

  for (const auto& b : p.blocks) p.rv_phi.push_back(block_rotation_vector(phi, b));
  p.h.assign(d, Rat(0));
  for (int i = 0; i < K; ++i)
    for (int k = 0; k < d; ++k) p.h[k] += lambda[i] * p.rv_phi[i][k];

  p.delta_phi = junction_errors(phi, p.blocks, ell);
  for (const auto& f : tracked) p.delta_f.push_back(junction_errors(f, p.blocks, ell)[0]);

  // V and v/R
  p.V.assign(d, std::vector<Rat>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p.V[i][j] = p.rv_phi[d][i] - p.rv_phi[j][i];
  RatVec x(d, Rat(0));
  if (d > 0) x = solve_square(p.V, p.delta_phi);
  p.R = common_denominator(x);
  for (int i = 0; i < d; ++i) {
    Rat scaled = x[i] * Rat(p.R);
    if (scaled.get_den() != 1) throw InternalError("v/R not in lowest terms");
    p.v.push_back(Int(scaled.get_num()));
  }

  p.A = 1;
  for (const auto& b : p.blocks) p.A *= Int(static_cast<unsigned long>(b.size()));

  p.C = 0;
  p.delta_star = 0;
  for (std::size_t fi = 0; fi < tracked.size(); ++fi) {
    for (const auto& b : p.blocks) {
      Rat av = rat_abs(block_rotation_vector(tracked[fi], b)[0]);
      if (av > p.C) p.C = av;
    }
    Rat ad = rat_abs(p.delta_f[fi]);
    if (ad > p.delta_star) p.delta_star = ad;
  }

  Int vsum(0);
  for (const auto& vi : p.v) vsum += vi;
  for (int j = 0; j < K; ++j) {
    Int len(static_cast<unsigned long>(p.blocks[j].size()));
    Int numerator = (j < d) ? Int(p.A * p.v[j]) : Int(-p.A * vsum);
    p.m_prime.push_back(exact_div(numerator, len, "m'"));
    p.M_prime.push_back(exact_div(p.A * p.q[j], len, "M'"));
  }

  // minimal t >= 1 with (i) the approximation inequality and (ii) every
  // block exponent t M'_j + m'_j >= 1 (which implies M_j >= 1)
  Rat S = Rat(p.A * p.R) * p.delta_star;
  for (int j = 0; j < K; ++j)
    S += p.C * Rat(abs(p.m_prime[j]) * Int(static_cast<unsigned long>(p.blocks[j].size())));
  Int B = p.A * p.A * p.R * p.Q;
  Int t = 1;
  if (S > 0) {
    Rat bound = 2 * S / (epsilon * Rat(B));
    Int cand = rat_floor(bound) + 1;
    if (cand > t) t = cand;
  }
  for (int j = 0; j < K; ++j) {
    Rat need = Rat(Int(1) - p.m_prime[j]) / Rat(p.M_prime[j]);
    Int cand = rat_ceil(need);
    if (cand > t) t = cand;
  }
  if (t > t_ceiling) {
    std::ostringstream msg;
    msg << "no feasible t below the ceiling " << t_ceiling.get_str()
        << " (needed t = " << t.get_str()
        << "; epsilon too small against R = " << p.R.get_str() << ")";
    throw RetryExhausted(msg.str());
  }
  p.t = t;

  Int AR = p.A * p.R;
  p.z_repeats = AR - 1;
  p.length = 0;
  for (int j = 0; j < K; ++j) {
    Int ye = t * p.M_prime[j] + p.m_prime[j];
    Int ze = t * p.M_prime[j];
    if (ye < 1 || ze < 1) throw InternalError("non-positive block exponent");
    p.y_exponents.push_back(ye);
    p.z_exponents.push_back(ze);
    Int Mj = t * AR * p.M_prime[j] + p.m_prime[j];
    if (Mj < 1) throw InternalError("M_j < 1");
    p.M.push_back(Mj);
    p.length += Mj * Int(static_cast<unsigned long>(p.blocks[j].size()));
  }
  if (p.length != t * p.A * p.A * p.R * p.Q)
    throw InternalError("plan length identity failed");
  return p;
}

std::vector<std::pair<Word, Int>> plan_window_counts(const SynthesisPlan& p,
                                                     int window_len) {
  int K = static_cast<int>(p.blocks.size());
  for (const auto& b : p.blocks)
    if (static_cast<int>(b.size()) < window_len)
      throw std::runtime_error("window longer than a block");
  int alpha = p.shift->alphabet().size();
  std::map<Word, Int> acc;
  Int AR = p.z_repeats + 1;
  for (int i = 0; i < K; ++i) {
    const Word& a = p.blocks[i];
    const Word& b = p.blocks[(i + 1) % K];
    // periodic windows of non-final copies
    Int reps = (p.y_exponents[i] - 1) + p.z_repeats * (p.z_exponents[i] - 1);
    if (reps > 0) {
      auto per = window_counts(a, window_len, alpha);
      for (const auto& [w, c] : per) acc[w] += reps * Int(c);
    }
    // final copy of each run: read into the next block
    Word ext = a;
    ext.insert(ext.end(), b.begin(), b.begin() + (window_len - 1));
    for (std::size_t pos = 0; pos < a.size(); ++pos) {
      Word w(ext.begin() + pos, ext.begin() + pos + window_len);
      acc[w] += AR;
    }
  }
  Int total(0);
  for (const auto& [w, c] : acc) total += c;
  if (total != p.length) throw InternalError("window count total mismatch");
  return {acc.begin(), acc.end()};
}

Word materialize_plan_word(const SynthesisPlan& p, std::size_t cap) {
  std::size_t len = int_to_size(p.length, cap, "plan word");
  Word out;
  out.reserve(len);
  auto append_round = [&](const std::vector<Int>& exps) {
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
      std::size_t e = int_to_size(exps[i], cap, "block exponent");
      for (std::size_t k = 0; k < e; ++k)
        out.insert(out.end(), p.blocks[i].begin(), p.blocks[i].end());
    }
  };
  append_round(p.y_exponents);
  std::size_t zr = int_to_size(p.z_repeats, cap, "z repeats");
  for (std::size_t k = 0; k < zr; ++k) append_round(p.z_exponents);
  if (out.size() != len) throw InternalError("materialized length mismatch");
  return out;
}

RealizedOrbit realize_plan(const SynthesisPlan& plan, const FollowerAutomaton& fa,
                           std::shared_ptr<const EdgeGraph> graph,
                           std::size_t materialize_cap) {
  if (!plan.phi) throw std::runtime_error("plan carries no constraint function");
  // certify x = y z^(AR-1) and its periodic extension via transition maps
  int K = static_cast<int>(plan.blocks.size());
  StateMap y_map = identity_map(fa.num_states());
  StateMap z_map = identity_map(fa.num_states());
  for (int i = 0; i < K; ++i) {
    StateMap bm = fa.word_map(plan.blocks[i]);
    y_map = compose_maps(y_map, map_power(bm, plan.y_exponents[i]));
    z_map = compose_maps(z_map, map_power(bm, plan.z_exponents[i]));
  }
  StateMap x_map = compose_maps(y_map, map_power(z_map, plan.z_repeats));
  int q = fa.initial();
  for (int i = 0; i <= fa.num_states(); ++i) {
    q = x_map[q];
    if (q < 0)
      throw InternalError("follower automaton rejected the synthesized word");
  }

  int W = graph->order() + 1;
  auto counts = plan_window_counts(plan, W);

  bool word_keyed = true;
  for (int v = 0; v < graph->num_vertices(); ++v)
    if (graph->vertex(v).state >= 0) {
      word_keyed = false;
      break;
    }
  std::optional<Word> xword;
  if (plan.length <= Int(static_cast<unsigned long>(materialize_cap)))
    xword = materialize_plan_word(plan, materialize_cap);

  std::optional<OccupationMeasure> occ;
  if (word_keyed) {
    std::vector<Rat> w(graph->num_edges(), Rat(0));
    Rat len(plan.length);
    for (const auto& [word, cnt] : counts) {
      auto es = graph->edges_with_word(word);
      if (es.size() != 1)
        throw InternalError("plan window is not an edge of the session graph");
      w[es[0]] = Rat(cnt) / len;
    }
    occ = OccupationMeasure(graph, std::move(w));
  } else {
    if (!xword)
      throw std::runtime_error(
          "plan too large to realize on a state-augmented (sofic) graph");
    occ = occupation_of_cycle(make_cycle(*xword), graph);
  }

  const LocallyConstantFn& phi = *plan.phi;
  int d = phi.dimension();
  RealizedOrbit orbit{std::nullopt,     std::nullopt, plan.length,
                      std::move(*occ),  RatVec{},     RatVec{},
                      {},               {}};
  orbit.x_word = std::move(xword);
  if (orbit.x_word) orbit.x = make_cycle(*orbit.x_word);

  // exact Birkhoff sums from window counts
  orbit.birkhoff_phi.assign(d, Rat(0));
  for (const auto& [word, cnt] : counts) {
    Rat c(cnt);
    for (int k = 0; k < d; ++k) orbit.birkhoff_phi[k] += c * phi.value_on(k, word);
  }
  Rat len(plan.length);
  orbit.rv.resize(d);
  for (int k = 0; k < d; ++k) orbit.rv[k] = orbit.birkhoff_phi[k] / len;
  if (!ratvec_eq(orbit.rv, plan.h))
    throw InternalError("realized rotation vector differs from the target");

  for (std::size_t fi = 0; fi < plan.tracked.size(); ++fi) {
    const LocallyConstantFn& f = *plan.tracked[fi];
    Rat s(0);
    for (const auto& [word, cnt] : counts) s += Rat(cnt) * f.value_on(0, word);
    orbit.birkhoff_tracked.push_back(s);
    Rat integral = s / len;
    orbit.tracked_integrals.push_back(integral);
    // |integral - sum lambda_i rv_f(a_i)| < epsilon/2 by the choice of t
    Rat combo(0);
    for (int i = 0; i < K; ++i)
      combo += plan.lambda[i] * block_rotation_vector(f, plan.blocks[i])[0];
    if (rat_abs(integral - combo) >= plan.epsilon / 2)
      throw InternalError("tracked integral drifted beyond epsilon/2");
  }
  return orbit;
}

namespace {

// ---- integer quantize-and-repair machinery for single_cycle_near ----

struct SupportCycle {
  std::vector<int> edges;
  std::vector<Int> psi;  // scaled rotation defect vector of one traversal
};

/// Simple cycles of the subgraph spanned by edges with keep[e] != 0.
std::vector<std::vector<int>> support_simple_cycles(const EdgeGraph& g,
                                                    const std::vector<char>& keep) {
  std::vector<std::vector<int>> out;
  int n = g.num_vertices();
  std::vector<char> blocked(n, 0), onpath(n, 0);
  std::vector<int> path;
  std::function<void(int, int)> dfs = [&](int start, int v) {
    for (int e : g.out_edges(v)) {
      if (!keep[e]) continue;
      int t = g.edge(e).to;
      if (t < start || blocked[t]) continue;
      if (t == start) {
        auto cyc = path;
        cyc.push_back(e);
        out.push_back(std::move(cyc));
        continue;
      }
      if (onpath[t]) continue;
      onpath[t] = 1;
      path.push_back(e);
      dfs(start, t);
      path.pop_back();
      onpath[t] = 0;
    }
  };
  for (int s = 0; s < n; ++s) {
    onpath[s] = 1;
    dfs(s, s);
    onpath[s] = 0;
    blocked[s] = 1;
  }
  return out;
}

/// Signed integer combination of the columns `vecs` (dimension <= 2)
/// summing to `target`, by column Euclid with combination tracking.
/// Returns coefficient-per-column, or nullopt when target is outside the
/// generated lattice.
std::optional<std::vector<Int>> integer_combination(
    const std::vector<std::vector<Int>>& vecs, std::vector<Int> target) {
  std::size_t ncols = vecs.size();
  if (ncols == 0) {
    for (const auto& t : target)
      if (t != 0) return std::nullopt;
    return std::vector<Int>{};
  }
  std::size_t dim = vecs[0].size();
  if (dim > 2) return std::nullopt;  // rotation repair supports d <= 2
  struct Col {
    std::vector<Int> v;
    std::vector<Int> combo;
  };
  std::vector<Col> cols;
  for (std::size_t j = 0; j < ncols; ++j) {
    Col c{vecs[j], std::vector<Int>(ncols, 0)};
    c.combo[j] = 1;
    cols.push_back(std::move(c));
  }
  auto reduce_on = [&](std::size_t row, std::vector<Col*>& active) -> Col* {
    // column Euclid on coordinate `row`; returns the pivot column
    while (true) {
      Col* best = nullptr;
      int nonzero = 0;
      for (auto* c : active)
        if (c->v[row] != 0) {
          ++nonzero;
          if (!best || abs(c->v[row]) < abs(best->v[row])) best = c;
        }
      if (nonzero <= 1) return best;
      for (auto* c : active) {
        if (c == best || c->v[row] == 0) continue;
        Int qq;
        mpz_fdiv_q(qq.get_mpz_t(), c->v[row].get_mpz_t(), best->v[row].get_mpz_t());
        if (qq != 0) {
          for (std::size_t k = 0; k < dim; ++k) c->v[k] -= qq * best->v[k];
          for (std::size_t k = 0; k < ncols; ++k) c->combo[k] -= qq * best->combo[k];
        }
      }
    }
  };
  std::vector<Col*> active;
  for (auto& c : cols) active.push_back(&c);
  Col* p0 = reduce_on(0, active);
  std::vector<Int> coeff(ncols, 0);
  Int alpha(0);
  if (p0) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), target[0].get_mpz_t(), p0->v[0].get_mpz_t());
    if (r != 0) return std::nullopt;
    alpha = exact_div(target[0], p0->v[0], "lattice pivot 0");
  } else if (target[0] != 0) {
    return std::nullopt;
  }
  if (dim == 1) {
    if (p0)
      for (std::size_t k = 0; k < ncols; ++k) coeff[k] += alpha * p0->combo[k];
    return coeff;
  }
  // dim == 2: eliminate row 1 among the columns with v[0] == 0
  std::vector<Col*> rest;
  for (auto& c : cols)
    if (&c != p0 && c.v[0] == 0) rest.push_back(&c);
  Col* p1 = reduce_on(1, rest);
  Int resid1 = target[1];
  if (p0) resid1 -= alpha * p0->v[1];
  Int beta(0);
  if (p1) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), resid1.get_mpz_t(), p1->v[1].get_mpz_t());
    if (r != 0) return std::nullopt;
    beta = exact_div(resid1, p1->v[1], "lattice pivot 1");
  } else if (resid1 != 0) {
    return std::nullopt;
  }
  if (p0)
    for (std::size_t k = 0; k < ncols; ++k) coeff[k] += alpha * p0->combo[k];
  if (p1)
    for (std::size_t k = 0; k < ncols; ++k) coeff[k] += beta * p1->combo[k];
  return coeff;
}

struct Quantized {
  std::vector<Int> n;  // edge multiplicities
  Int total;
};

/// Hierholzer circuit over edge multiplicities; returns the edge sequence
/// rotated so that it starts with start_edge.
std::vector<int> euler_circuit(const EdgeGraph& g, std::vector<Int> n,
                               int start_edge, std::size_t cap) {
  Int total(0);
  for (const auto& c : n) total += c;
  std::size_t len = int_to_size(total, cap, "euler circuit");
  std::vector<std::size_t> next_out(g.num_vertices(), 0);
  std::vector<int> stack_v;
  std::vector<int> stack_e;
  std::vector<int> circuit;
  circuit.reserve(len);
  int start_v = g.edge(start_edge).from;
  stack_v.push_back(start_v);
  stack_e.push_back(-1);
  while (!stack_v.empty()) {
    int v = stack_v.back();
    bool advanced = false;
    auto& cursor = next_out[v];
    const auto& outs = g.out_edges(v);
    while (cursor < outs.size()) {
      int e = outs[cursor];
      if (n[e] > 0) {
        n[e] -= 1;
        stack_v.push_back(g.edge(e).to);
        stack_e.push_back(e);
        advanced = true;
        break;
      }
      ++cursor;
    }
    if (!advanced) {
      circuit.push_back(stack_e.back());
      stack_e.pop_back();
      stack_v.pop_back();
    }
  }
  circuit.pop_back();  // drop the -1 sentinel
  std::reverse(circuit.begin(), circuit.end());
  if (circuit.size() != len)
    throw InternalError("euler circuit did not exhaust the multigraph");
  // rotate so the designated edge comes first
  auto it = std::find(circuit.begin(), circuit.end(), start_edge);
  if (it == circuit.end()) throw InternalError("start edge missing from circuit");
  std::rotate(circuit.begin(), it, circuit.end());
  return circuit;
}

}  // namespace

Cycle single_cycle_near(const OccupationMeasure& y, const Word& u, const Rat& r,
                        long initial_scale,
                        const std::optional<ExactRvTarget>& exact,
                        std::size_t length_cap) {
  if (r <= 0) throw std::runtime_error("r must be positive");
  const auto graph = y.graph_ptr();
  const EdgeGraph& g = *graph;
  if (!g.strongly_connected())
    throw std::runtime_error("shift is not irreducible at this order");
  if (u.empty() || static_cast<int>(u.size()) > g.order() + 1)
    throw std::runtime_error("sync word must have length 1..L+1");

  // designated u-edge: lexicographically least edge whose block begins
  // with u (edges are sorted by word)
  int u_edge = -1;
  for (int e = 0; e < g.num_edges(); ++e)
    if (is_prefix(u, g.edge(e).word)) {
      u_edge = e;
      break;
    }
  if (u_edge < 0) throw std::runtime_error("no edge starts with the sync word");

  // fast path: y is already a single cycle through u
  {
    ConvexCombo combo = flow_decompose(y);
    if (combo.cycles.size() == 1 && cyclic_contains(combo.cycles[0].word, u)) {
      bool ok = !exact;
      if (exact) {
        RatVec rv = integrate(y, *exact->phi);
        ok = ratvec_eq(rv, exact->target);
      }
      if (ok) return combo.cycles[0];
    }
  }

  // scaled integer rotation data for the exact repair
  int d = exact ? static_cast<int>(exact->target.size()) : 0;
  std::vector<std::vector<Int>> psi;  // per edge, dimension d
  if (exact) {
    RatVec dens;
    for (int e = 0; e < g.num_edges(); ++e)
      for (int k = 0; k < d; ++k)
        dens.push_back(exact->phi->values[e][k] - exact->target[k]);
    Int D = common_denominator(dens);
    psi.assign(g.num_edges(), std::vector<Int>(d));
    for (int e = 0; e < g.num_edges(); ++e)
      for (int k = 0; k < d; ++k) {
        Rat scaled = (exact->phi->values[e][k] - exact->target[k]) * Rat(D);
        if (scaled.get_den() != 1) throw InternalError("psi scaling failed");
        psi[e][k] = scaled.get_num();
      }
  }

  std::string last_failure = "not attempted";
  for (long P = std::max(4L, initial_scale); ; P *= 2) {
    if (static_cast<std::size_t>(P) > length_cap)
      throw RetryExhausted("single_cycle_near: length cap reached (" +
                           last_failure + ")");
    std::vector<Int> n(g.num_edges(), 0);
    for (int e = 0; e < g.num_edges(); ++e) {
      Rat scaled = y.weight(e) * Rat(P) + Rat(1, 2);
      n[e] = rat_floor(scaled);
    }
    // keep the u-edge present
    if (n[u_edge] == 0) {
      auto back = g.shortest_path(g.edge(u_edge).to, g.edge(u_edge).from);
      if (!back) throw InternalError("strongly connected graph lost a path");
      n[u_edge] += 1;
      for (int e : *back) n[e] += 1;
    }
    // repair flow balance with shortest surplus->deficit paths
    auto imbalance = [&](int v) {
      Int b(0);
      for (int e : g.out_edges(v)) b += n[e];
      for (int e : g.in_edges(v)) b -= n[e];
      return b;  // positive: too many departures, needs an extra arrival
    };
    while (true) {
      int surplus = -1, deficit = -1;
      for (int v = 0; v < g.num_vertices(); ++v) {
        Int b = imbalance(v);
        if (b < 0 && surplus < 0) surplus = v;   // more in than out
        if (b > 0 && deficit < 0) deficit = v;   // more out than in
      }
      if (surplus < 0 && deficit < 0) break;
      if (surplus < 0 || deficit < 0)
        throw InternalError("one-sided imbalance in a closed flow");
      auto path = g.shortest_path(surplus, deficit);
      if (!path) throw InternalError("strongly connected graph lost a path");
      for (int e : *path) n[e] += 1;
    }
    // connect the support into one component through the u-edge
    {
      std::vector<int> comp(g.num_vertices(), -1);
      std::function<void(int, int)> mark = [&](int v, int c) {
        comp[v] = c;
        for (int e : g.out_edges(v))
          if (n[e] > 0 && comp[g.edge(e).to] < 0) mark(g.edge(e).to, c);
        for (int e : g.in_edges(v))
          if (n[e] > 0 && comp[g.edge(e).from] < 0) mark(g.edge(e).from, c);
      };
      int ncomp = 0;
      for (int v = 0; v < g.num_vertices(); ++v) {
        bool touched = false;
        for (int e : g.out_edges(v))
          if (n[e] > 0) touched = true;
        for (int e : g.in_edges(v))
          if (n[e] > 0) touched = true;
        if (touched && comp[v] < 0) mark(v, ncomp++);
      }
      int base = comp[g.edge(u_edge).from];
      for (int c = 0; c < ncomp; ++c) {
        if (c == base) continue;
        int v2 = -1;
        for (int v = 0; v < g.num_vertices(); ++v)
          if (comp[v] == c) {
            v2 = v;
            break;
          }
        int v1 = g.edge(u_edge).from;
        auto p1 = g.shortest_path(v1, v2);
        auto p2 = g.shortest_path(v2, v1);
        if (!p1 || !p2) throw InternalError("strongly connected graph lost a path");
        for (int e : *p1) n[e] += 1;
        for (int e : *p2) n[e] += 1;
        for (int v = 0; v < g.num_vertices(); ++v)
          if (comp[v] == c) comp[v] = base;
      }
    }
    // exact rotation repair by a signed combination of support cycles
    if (exact) {
      std::vector<Int> defect(d, 0);
      for (int e = 0; e < g.num_edges(); ++e)
        if (n[e] != 0)
          for (int k = 0; k < d; ++k) defect[k] += n[e] * psi[e][k];
      bool repaired = true;
      if (!std::all_of(defect.begin(), defect.end(),
                       [](const Int& x) { return x == 0; })) {
        std::vector<char> keep(g.num_edges(), 0);
        for (int e = 0; e < g.num_edges(); ++e) keep[e] = n[e] > 0;
        auto cyc_edges = support_simple_cycles(g, keep);
        std::vector<std::vector<Int>> vecs;
        for (const auto& ce : cyc_edges) {
          std::vector<Int> m(d, 0);
          for (int e : ce)
            for (int k = 0; k < d; ++k) m[k] += psi[e][k];
          vecs.push_back(std::move(m));
        }
        std::vector<Int> target(d);
        for (int k = 0; k < d; ++k) target[k] = -defect[k];
        auto coeff = integer_combination(vecs, target);
        repaired = false;
        if (coeff) {
          std::vector<Int> n2 = n;
          bool feasible = true;
          for (std::size_t j = 0; j < cyc_edges.size() && feasible; ++j) {
            if ((*coeff)[j] == 0) continue;
            for (int e : cyc_edges[j]) {
              n2[e] += (*coeff)[j];
              if (n2[e] < 0) feasible = false;
            }
          }
          if (feasible) {
            std::vector<Int> check(d, 0);
            for (int e = 0; e < g.num_edges(); ++e)
              if (n2[e] != 0)
                for (int k = 0; k < d; ++k) check[k] += n2[e] * psi[e][k];
            if (std::all_of(check.begin(), check.end(),
                            [](const Int& x) { return x == 0; }) &&
                n2[u_edge] > 0) {
              n = std::move(n2);
              repaired = true;
            } else {
              last_failure = "rotation repair broke an invariant";
            }
          } else {
            last_failure = "rotation repair dug below zero";
          }
        } else {
          last_failure = "rotation defect outside the support-cycle lattice";
        }
      }
      if (!repaired) continue;
    }
    // verify the contract exactly
    Int total(0);
    for (const auto& c : n) total += c;
    Rat len(total);
    bool ok = true;
    std::map<Word, Rat> freq_n, freq_y;
    for (int e = 0; e < g.num_edges(); ++e) {
      freq_n[g.edge(e).word] += Rat(n[e]) / len;
      freq_y[g.edge(e).word] += y.weight(e);
    }
    for (const auto& [w, f] : freq_n)
      if (rat_abs(f - freq_y[w]) >= r) {
        ok = false;
        last_failure = "block frequency off target";
        break;
      }
    if (ok && exact) {
      RatVec rv(d, Rat(0));
      for (int e = 0; e < g.num_edges(); ++e)
        if (n[e] != 0)
          for (int k = 0; k < d; ++k)
            rv[k] += Rat(n[e]) * exact->phi->values[e][k];
      for (int k = 0; k < d; ++k) rv[k] /= len;
      if (!ratvec_eq(rv, exact->target))
        throw InternalError("exact rotation repair failed verification");
    }
    if (!ok) continue;

    auto circuit = euler_circuit(g, n, u_edge, length_cap);
    Word word;
    word.reserve(circuit.size());
    for (int e : circuit) word.push_back(g.edge(e).word[0]);
    return make_cycle(word);
  }
}

ApproximationResult approximate_in_fiber(const ApproximationRequest& req,
                                         const LocallyConstantFn& phi) {
  const auto graph = req.nu.graph_ptr();
  const EdgeGraph& g = *graph;
  int d = phi.dimension();
  if (static_cast<int>(req.h.size()) != d)
    throw std::runtime_error("h dimension mismatch");
  if (req.epsilon <= 0) throw ParseError("epsilon must be positive");
  EdgeLift phi_lift = lift_to_edges(phi, g);
  {
    RatVec rv = integrate(req.nu, phi_lift);
    if (!ratvec_eq(rv, req.h))
      throw std::runtime_error("nu does not lie in the target fiber");
  }
  auto shift = g.shift_ptr();
  FollowerAutomaton fa = follower_automaton(*shift);

  // step 1: synchronizing word of maximal nu-frequency, length <= L+1
  Word u;
  Rat best_freq(-1);
  {
    std::function<void(Word&)> rec = [&](Word& w) {
      if (!w.empty()) {
        if (fa.word_state(w) >= 0) {
          Rat f = cylinder_frequency(req.nu, w);
          if (f > 0 && is_synchronizing(fa, w)) {
            if (f > best_freq || (f == best_freq && w < u)) {
              best_freq = f;
              u = w;
            }
          }
        } else {
          return;  // dead branch
        }
      }
      if (static_cast<int>(w.size()) == g.order() + 1) return;
      for (int a = 0; a < shift->alphabet().size(); ++a) {
        w.push_back(a);
        rec(w);
        w.pop_back();
      }
    };
    Word w0;
    rec(w0);
  }
  if (u.empty())
    throw RetryExhausted(
        "no synchronizing word of positive nu-frequency up to length L+1");

  std::vector<LocallyConstantFn> family = req.test_family;
  family.push_back(LocallyConstantFn::indicator(shift, u));
  Rat eps = req.epsilon;
  Rat half_freq = best_freq / 2;
  if (half_freq < eps) eps = half_freq;

  // step 2: interior certificate
  RotationPolytope rot = rotation_set(g, phi_lift);
  InteriorVerdict verdict = interior_certificate(rot, req.h);
  if (verdict.kind != InteriorKind::Interior)
    throw BoundaryRotationVector(
        verdict.kind == InteriorKind::Boundary
            ? "h lies on the boundary of the rotation set"
            : "h lies outside the rotation set");
  const InteriorCertificate& cert = *verdict.certificate;

  // step 3: fiber points at the simplex probes
  std::vector<OccupationMeasure> xi;
  for (const auto& probe : cert.probes)
    xi.push_back(fiber_sample(graph, phi_lift, probe));

  // step 4: mixing scale; o is a dyadic rounding of t0*delta so the
  // perturbed rotation targets keep small denominators
  Rat maxnorm(0);
  for (const auto& f : family) maxnorm = std::max(maxnorm, f.sup_norm());
  if (maxnorm == 0) maxnorm = 1;
  Rat t0 = eps / (8 * maxnorm);
  Rat o = dyadic_floor(t0 * cert.delta);
  Rat mix = o / cert.delta;  // the proof's t, strictly below its bound

  std::vector<RatVec> targets;  // tau_i = h + o * dir_i
  std::vector<OccupationMeasure> nu_i;
  for (int i = 0; i <= d; ++i) {
    RatVec tau(d);
    for (int k = 0; k < d; ++k) {
      Rat dir = (i < d) ? Rat(k == i ? 1 : 0) : Rat(-1);
      tau[k] = req.h[k] + o * dir;
    }
    targets.push_back(tau);
    nu_i.push_back(convex_combine({req.nu, xi[i]}, {Rat(1) - mix, mix}));
    if (!ratvec_eq(integrate(nu_i.back(), phi_lift), tau))
      throw InternalError("perturbed fiber point misses its target");
  }

  const std::vector<Rat>& schedule =
      req.r_schedule.empty() ? default_r_schedule() : req.r_schedule;
  Rat quarter = eps / 4;

  std::string diagnostics;
  for (const auto& r : schedule) {
    try {
      std::vector<Cycle> cycles;
      bool close_enough = true;
      for (int i = 0; i <= d && close_enough; ++i) {
        ExactRvTarget ex{&phi_lift, targets[i]};
        Cycle c = single_cycle_near(nu_i[i], u, r, 1L << 16,
                                    d <= 2 ? std::optional(ex) : std::nullopt,
                                    req.length_cap);
        auto occ = occupation_of_cycle(c, graph);
        for (const auto& f : family) {
          Rat a = integrate(occ, f)[0];
          Rat b = integrate(nu_i[i], f)[0];
          if (rat_abs(a - b) >= quarter) {
            close_enough = false;
            diagnostics = "cycle strayed from nu_i on the test family";
            break;
          }
        }
        cycles.push_back(std::move(c));
      }
      if (!close_enough) continue;

      // step 6: rank and positive weights
      std::vector<Rat> lambda = recover_weights(cycles, phi, req.h, true);

      // step 7: align to the shared prefix
      std::vector<Word> words;
      for (const auto& c : cycles) words.push_back(rotate_to_prefix(c.word, u));

      // step 8: assemble and realize
      SynthesisPlan plan = build_plan(fa, u, words, lambda, phi, family, eps,
                                      req.t_ceiling);
      plan.phi = std::make_shared<const LocallyConstantFn>(phi);
      for (const auto& f : family)
        plan.tracked.push_back(std::make_shared<const LocallyConstantFn>(f));
      RealizedOrbit orbit = realize_plan(plan, fa, graph);

      // final containment checks against the request
      if (!ratvec_eq(orbit.rv, req.h))
        throw InternalError("pipeline produced a wrong rotation vector");
      for (std::size_t fi = 0; fi < family.size(); ++fi) {
        Rat a = orbit.tracked_integrals[fi];
        Rat b = integrate(req.nu, family[fi])[0];
        if (rat_abs(a - b) >= eps)
          throw InternalError("pipeline output escaped the weak* ball");
      }
      ApproximationResult res{std::move(plan), std::move(orbit), u, eps,
                              std::move(lambda)};
      return res;
    } catch (const RetryExhausted& e) {
      diagnostics = e.what();
      continue;
    } catch (const InfeasibleError& e) {
      diagnostics = e.what();
      continue;  // non-interior weights: shrink r and retry
    } catch (const DegenerateGeometry& e) {
      diagnostics = e.what();
      continue;  // rank condition failed at this r
    }
  }
  throw RetryExhausted("approximation schedule exhausted: " + diagnostics);
}

}  // namespace soficopt
