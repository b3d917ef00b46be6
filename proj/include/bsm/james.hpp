#pragma once

#include "bsm/vector.hpp"

namespace bsm {

struct JamesNorm {
  Rat sq; // squared norm
  std::vector<std::pair<long long, long long>> intervals; // minimal witness, disjoint
  std::vector<Rat> sums; // interval sums, sq == sum of squares
};

// sup over disjoint interval collections of sum (interval sum)^2, attained;
// the witness uses minimal intervals and the leftmost optimal choice.
JamesNorm james_norm_sq(const FinVec& x);

// Coordinate restriction to [lo, hi] for natural-scheme vectors.
FinVec fv_restrict_natural(const FinVec& x, long long lo, long long hi);

// The canonical spreading pair inside the James space:
//   row 1: e_{2n} + e_1, row 2: e_{2n+1} - e_1.
FinVec james_pair_vector(int i, long long n);

// Realizes an interleaved (l = 2) combination in the James space.
FinVec james_materialize(const FinVec& interleaved);

} // namespace bsm
