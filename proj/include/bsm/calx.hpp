#pragma once

#include "bsm/radical.hpp"
#include "bsm/vector.hpp"

namespace bsm {

struct CalxNormSq {
  RadicalSum value;
  std::string decimal; // 12-digit decimal of the squared norm
};

// Squared norm over the mixed_sum scheme: per block n, the X part (part 0)
// joins its 2n l2 slots additively and the Y part (part 1) by maximum,
// blocks combine in l2:
//   sum_n [ (sum_j ||x_{n(j)}||)^2 + (max_j ||y_{n(j)}||)^2 ]
// Cross products of slot norms make the value a radical sum.
CalxNormSq calx_norm_sq(const FinVec& x);

// Exact sqrt of a rational perfect square (slot norms of integer-friendly
// probes); throws std::domain_error otherwise.
Rat slot_norm_exact(const Rat& slot_sq);

struct MixedNorm {
  F50 value;
  std::string decimal; // 12-digit decimal of the norm
  bool exact;          // computed through an exact path (p, q in {1, 2})
};

// Two-level norm: each (n, part, j) slot carries l_p, slots join in l_q.
// p, q rational, >= 1 and finite.
MixedNorm mixed_pq_norm(const FinVec& x, const Rat& p, const Rat& q);

} // namespace bsm
