#pragma once

#include "bsm/rational.hpp"

#include <vector>

namespace bsm {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rat objective;
  std::vector<Rat> x;
};

// Exact two-phase primal simplex with Bland's rule:
//   minimize c.x  subject to  A x = b, x >= 0.
// Row count = b.size(); every row of A must have c.size() columns.
LpResult lp_solve_eq(const std::vector<std::vector<Rat>>& A, const std::vector<Rat>& b,
                     const std::vector<Rat>& c);

// min over lambda in the standard simplex of
//   max_k w_k * | sum_i lambda_i M[k][i] - t[k] |        (linf flavor)
//   sum_k w_k * | sum_i lambda_i M[k][i] - t[k] |        (l1 flavor)
// M is row-major with one row per k; weights w_k >= 0. Returns the optimum
// and the minimizing lambda.
struct SimplexGap {
  Rat value;
  std::vector<Rat> lambda;
};
SimplexGap min_weighted_linf_over_simplex(const std::vector<std::vector<Rat>>& M,
                                          const std::vector<Rat>& t,
                                          const std::vector<Rat>& w);
SimplexGap min_weighted_l1_over_simplex(const std::vector<std::vector<Rat>>& M,
                                        const std::vector<Rat>& t,
                                        const std::vector<Rat>& w);

} // namespace bsm
