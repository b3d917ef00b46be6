#include "bsm/lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace bsm {

namespace {

struct Tableau {
  std::vector<std::vector<Rat>> rows; // m x (ncols + 1), rhs last, canonical
  std::vector<size_t> basis;          // basic column per row
  size_t ncols = 0;

  Rat& rhs(size_t i) { return rows[i][ncols]; }
};

void pivot(Tableau& t, size_t r, size_t c) {
  auto& pr = t.rows[r];
  Rat pv = pr[c];
  for (auto& v : pr) v /= pv;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    if (i == r) continue;
    Rat f = t.rows[i][c];
    if (f == 0) continue;
    for (size_t j = 0; j <= t.ncols; ++j) t.rows[i][j] -= f * pr[j];
  }
  t.basis[r] = c;
}

// Minimizes cost over the columns marked usable; Bland's rule, so it
// terminates without anti-cycling perturbations. Returns false on unbounded.
bool run_simplex(Tableau& t, const std::vector<Rat>& cost, const std::vector<char>& usable) {
  size_t m = t.rows.size();
  for (;;) {
    // y_i = cost of the basic variable in row i
    std::vector<const Rat*> cb(m);
    for (size_t i = 0; i < m; ++i) cb[i] = &cost[t.basis[i]];
    size_t enter = t.ncols;
    for (size_t j = 0; j < t.ncols && enter == t.ncols; ++j) {
      if (!usable[j]) continue;
      Rat red = cost[j];
      for (size_t i = 0; i < m; ++i)
        if (*cb[i] != 0 && t.rows[i][j] != 0) red -= *cb[i] * t.rows[i][j];
      if (red < 0) enter = j;
    }
    if (enter == t.ncols) return true; // optimal
    size_t leave = m;
    Rat best;
    for (size_t i = 0; i < m; ++i) {
      if (t.rows[i][enter] <= 0) continue;
      Rat ratio = t.rhs(i) / t.rows[i][enter];
      if (leave == m || ratio < best ||
          (ratio == best && t.basis[i] < t.basis[leave]))
        leave = i, best = ratio;
    }
    if (leave == m) return false; // unbounded
    pivot(t, leave, enter);
  }
}

} // namespace

LpResult lp_solve_eq(const std::vector<std::vector<Rat>>& A, const std::vector<Rat>& b,
                     const std::vector<Rat>& c) {
  size_t m = b.size(), n = c.size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("lp: ragged constraint matrix");
  if (A.size() != m) throw std::invalid_argument("lp: row count mismatch");

  Tableau t;
  t.ncols = n + m; // artificials appended
  t.rows.assign(m, std::vector<Rat>(t.ncols + 1, Rat(0)));
  t.basis.resize(m);
  for (size_t i = 0; i < m; ++i) {
    int s = b[i] < 0 ? -1 : 1;
    for (size_t j = 0; j < n; ++j) t.rows[i][j] = Rat(s) * A[i][j];
    t.rows[i][n + i] = 1;
    t.rhs(i) = Rat(s) * b[i];
    t.basis[i] = n + i;
  }

  std::vector<Rat> phase1(t.ncols, Rat(0));
  for (size_t j = n; j < t.ncols; ++j) phase1[j] = 1;
  std::vector<char> usable(t.ncols, 1);
  if (!run_simplex(t, phase1, usable))
    throw std::logic_error("lp: phase 1 unbounded");
  Rat infeas = 0;
  for (size_t i = 0; i < m; ++i)
    if (t.basis[i] >= n) infeas += t.rhs(i);
  LpResult out;
  if (infeas != 0) {
    out.status = LpStatus::infeasible;
    return out;
  }
  // drive leftover zero-value artificials out of the basis where possible
  for (size_t i = 0; i < m; ++i) {
    if (t.basis[i] < n) continue;
    size_t piv = n;
    for (size_t j = 0; j < n && piv == n; ++j)
      if (t.rows[i][j] != 0) piv = j;
    if (piv < n) pivot(t, i, piv);
  }
  for (size_t j = n; j < t.ncols; ++j) usable[j] = 0;

  std::vector<Rat> cost(t.ncols, Rat(0));
  for (size_t j = 0; j < n; ++j) cost[j] = c[j];
  if (!run_simplex(t, cost, usable)) {
    out.status = LpStatus::unbounded;
    return out;
  }
  out.status = LpStatus::optimal;
  out.x.assign(n, Rat(0));
  for (size_t i = 0; i < m; ++i)
    if (t.basis[i] < n) out.x[t.basis[i]] = t.rhs(i);
  out.objective = 0;
  for (size_t j = 0; j < n; ++j) out.objective += c[j] * out.x[j];
  return out;
}

namespace {

// Shared construction: variables are lambda_1..lambda_N followed by the gap
// variables (one per row for l1, a single one for linf), then one slack per
// absolute-value inequality.
SimplexGap abs_gap_lp(const std::vector<std::vector<Rat>>& M, const std::vector<Rat>& t,
                      const std::vector<Rat>& w, bool linf) {
  size_t K = M.size();
  if (t.size() != K || w.size() != K) throw std::invalid_argument("lp: shape mismatch");
  size_t N = K ? M[0].size() : 0;
  for (const auto& row : M)
    if (row.size() != N) throw std::invalid_argument("lp: ragged value matrix");
  size_t ngap = linf ? 1 : K;
  size_t nvar = N + ngap + 2 * K; // lambdas, gaps, slacks
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b, c(nvar, Rat(0));
  // sum lambda = 1
  {
    std::vector<Rat> row(nvar, Rat(0));
    for (size_t i = 0; i < N; ++i) row[i] = 1;
    A.push_back(row);
    b.push_back(Rat(1));
  }
  // +-(w_k (M_k . lambda - t_k)) <= gap_k
  for (size_t k = 0; k < K; ++k) {
    size_t gap_col = N + (linf ? 0 : k);
    for (int sgn : {+1, -1}) {
      std::vector<Rat> row(nvar, Rat(0));
      for (size_t i = 0; i < N; ++i) row[i] = Rat(sgn) * w[k] * M[k][i];
      row[gap_col] = -1;
      row[N + ngap + 2 * k + (sgn > 0 ? 0 : 1)] = 1; // slack
      A.push_back(row);
      b.push_back(Rat(sgn) * w[k] * t[k]);
    }
  }
  if (linf) {
    c[N] = 1;
  } else {
    for (size_t k = 0; k < K; ++k) c[N + k] = 1;
  }
  LpResult r = lp_solve_eq(A, b, c);
  if (r.status != LpStatus::optimal)
    throw std::logic_error("lp: simplex gap problem must be feasible and bounded");
  SimplexGap out;
  out.value = r.objective;
  out.lambda.assign(r.x.begin(), r.x.begin() + N);
  return out;
}

} // namespace

SimplexGap min_weighted_linf_over_simplex(const std::vector<std::vector<Rat>>& M,
                                          const std::vector<Rat>& t,
                                          const std::vector<Rat>& w) {
  return abs_gap_lp(M, t, w, true);
}

SimplexGap min_weighted_l1_over_simplex(const std::vector<std::vector<Rat>>& M,
                                        const std::vector<Rat>& t,
                                        const std::vector<Rat>& w) {
  return abs_gap_lp(M, t, w, false);
}

} // namespace bsm
