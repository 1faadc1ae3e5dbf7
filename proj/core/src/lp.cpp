#include "soficopt/lp.hpp"

#include <stdexcept>

#include "soficopt/errors.hpp"

namespace soficopt {

namespace {

class Tableau {
 public:
  // columns: 0..n-1 structural, n..n+m-1 artificial; rhs kept separately
  Tableau(const std::vector<std::vector<Rat>>& A, const std::vector<Rat>& b)
      : m_(static_cast<int>(A.size())),
        n_(A.empty() ? 0 : static_cast<int>(A[0].size())) {
    rows_.assign(m_, std::vector<Rat>(n_ + m_, Rat(0)));
    rhs_.resize(m_);
    row_sign_.assign(m_, 1);
    basis_.resize(m_);
    in_basis_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) {
      int s = (b[i] < 0) ? -1 : 1;
      row_sign_[i] = s;
      for (int j = 0; j < n_; ++j) rows_[i][j] = s < 0 ? Rat(-A[i][j]) : A[i][j];
      rhs_[i] = s < 0 ? Rat(-b[i]) : b[i];
      rows_[i][n_ + i] = 1;
      basis_[i] = n_ + i;
      in_basis_[n_ + i] = i;
    }
  }

  int m() const { return m_; }
  int n() const { return n_; }
  bool is_artificial(int col) const { return col >= n_; }
  int basis(int i) const { return basis_[i]; }
  const Rat& rhs(int i) const { return rhs_[i]; }
  const Rat& at(int i, int j) const { return rows_[i][j]; }
  int row_sign(int i) const { return row_sign_[i]; }
  bool col_is_basic(int j) const { return in_basis_[j] >= 0; }

  /// Installs the maximization objective `cost` over all columns; the
  /// maintained row holds reduced costs cost_j - cost_B . column_j.
  void set_objective(const std::vector<Rat>& cost) {
    obj_.assign(n_ + m_, Rat(0));
    obj_value_ = 0;
    for (int j = 0; j < n_ + m_; ++j) obj_[j] = cost[j];
    for (int i = 0; i < m_; ++i) {
      const Rat& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (int j = 0; j < n_ + m_; ++j)
        if (rows_[i][j] != 0) obj_[j] -= cb * rows_[i][j];
      obj_value_ += cb * rhs_[i];
    }
  }

  const Rat& reduced_cost(int j) const { return obj_[j]; }
  const Rat& objective_value() const { return obj_value_; }

  void pivot(int row, int col) {
    Rat p = rows_[row][col];
    if (p == 0) throw InternalError("pivot on zero element");
    if (p != 1) {
      for (auto& v : rows_[row])
        if (v != 0) v /= p;
      rows_[row][col] = 1;
      rhs_[row] /= p;
    }
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      Rat f = rows_[i][col];
      if (f == 0) continue;
      for (int j = 0; j < n_ + m_; ++j)
        if (rows_[row][j] != 0) rows_[i][j] -= f * rows_[row][j];
      rhs_[i] -= f * rhs_[row];
    }
    if (!obj_.empty()) {
      Rat f = obj_[col];
      if (f != 0) {
        for (int j = 0; j < n_ + m_; ++j)
          if (rows_[row][j] != 0) obj_[j] -= f * rows_[row][j];
        obj_value_ += f * rhs_[row];
      }
    }
    in_basis_[basis_[row]] = -1;
    basis_[row] = col;
    in_basis_[col] = row;
  }

  /// Bland's rule; entering restricted to allow(col).
  template <class Allow>
  LpStatus run(const Allow& allow) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < n_ + m_; ++j) {
        if (!allow(j) || col_is_basic(j)) continue;
        if (obj_[j] > 0) {
          enter = j;
          break;  // lowest index
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      Rat best;
      for (int i = 0; i < m_; ++i) {
        if (rows_[i][enter] <= 0) continue;
        Rat ratio = rhs_[i] / rows_[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
  }

 private:
  int m_, n_;
  std::vector<std::vector<Rat>> rows_;
  std::vector<Rat> rhs_;
  std::vector<Rat> obj_;
  Rat obj_value_;
  std::vector<int> basis_;
  std::vector<int> in_basis_;
  std::vector<int> row_sign_;
};

}  // namespace

LpResult solve_lp_max(const std::vector<std::vector<Rat>>& A,
                      const std::vector<Rat>& b, const std::vector<Rat>& c) {
  int m = static_cast<int>(A.size());
  int n = m ? static_cast<int>(A[0].size()) : static_cast<int>(c.size());
  for (const auto& row : A)
    if (static_cast<int>(row.size()) != n)
      throw std::runtime_error("ragged LP matrix");
  if (static_cast<int>(c.size()) != n || static_cast<int>(b.size()) != m)
    throw std::runtime_error("LP dimension mismatch");

  Tableau t(A, b);

  // phase 1: maximize -sum(artificials)
  std::vector<Rat> cost1(n + m, Rat(0));
  for (int j = n; j < n + m; ++j) cost1[j] = Rat(-1);
  t.set_objective(cost1);
  LpStatus s1 = t.run([](int) { return true; });
  if (s1 == LpStatus::Unbounded) throw InternalError("phase 1 unbounded");
  LpResult res;
  if (t.objective_value() != 0) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  // drive basic artificials out where an original column allows it
  for (int i = 0; i < t.m(); ++i) {
    if (!t.is_artificial(t.basis(i))) continue;
    for (int j = 0; j < n; ++j) {
      if (t.at(i, j) != 0) {
        t.pivot(i, j);
        break;
      }
    }
  }

  // phase 2
  std::vector<Rat> cost2(n + m, Rat(0));
  for (int j = 0; j < n; ++j) cost2[j] = c[j];
  t.set_objective(cost2);
  LpStatus s2 = t.run([&](int j) { return j < n; });
  if (s2 == LpStatus::Unbounded) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  res.status = LpStatus::Optimal;
  res.value = t.objective_value();
  res.x.assign(n, Rat(0));
  for (int i = 0; i < t.m(); ++i)
    if (t.basis(i) < n) res.x[t.basis(i)] = t.rhs(i);

  // duals via the artificial columns (they carry B^-1 of the sign-fixed
  // system): y = cost_B . B^-1, then undo row sign flips
  res.dual.assign(m, Rat(0));
  for (int i = 0; i < m; ++i) {
    Rat y = -t.reduced_cost(n + i);
    res.dual[i] = t.row_sign(i) < 0 ? Rat(-y) : y;
  }

  // uniqueness of the optimal vertex
  res.unique_vertex = true;
  for (int j = 0; j < n && res.unique_vertex; ++j) {
    if (t.col_is_basic(j)) continue;
    if (t.reduced_cost(j) != 0) continue;
    Rat best;
    bool any = false;
    for (int i = 0; i < t.m(); ++i) {
      if (t.at(i, j) <= 0) continue;
      Rat ratio = t.rhs(i) / t.at(i, j);
      if (!any || ratio < best) {
        any = true;
        best = ratio;
      }
    }
    if (!any || best > 0) res.unique_vertex = false;
  }
  return res;
}

void LpBuilder::add_row(std::vector<Rat> coeffs, RowSense sense, Rat rhs) {
  if (static_cast<int>(coeffs.size()) != n_)
    throw std::runtime_error("LP row arity mismatch");
  rows_.push_back(std::move(coeffs));
  senses_.push_back(sense);
  rhs_.push_back(std::move(rhs));
}

LpResult LpBuilder::solve() const {
  int m = static_cast<int>(rows_.size());
  int slacks = 0;
  for (auto s : senses_)
    if (s != RowSense::Eq) ++slacks;
  int n = n_ + slacks;
  std::vector<std::vector<Rat>> A(m, std::vector<Rat>(n, Rat(0)));
  std::vector<Rat> b = rhs_;
  std::vector<Rat> c(n, Rat(0));
  for (int j = 0; j < n_; ++j) c[j] = c_[j];
  int sk = n_;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n_; ++j) A[i][j] = rows_[i][j];
    if (senses_[i] == RowSense::Le)
      A[i][sk++] = 1;
    else if (senses_[i] == RowSense::Ge)
      A[i][sk++] = -1;
  }
  LpResult r = solve_lp_max(A, b, c);
  if (r.status == LpStatus::Optimal) r.x.resize(n_);
  return r;
}

}  // namespace soficopt
