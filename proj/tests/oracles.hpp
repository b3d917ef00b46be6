#pragma once

// Independent brute-force evaluators used to pin expected values. These
// deliberately share no code with the library: plain recursion/enumeration
// straight from the definitions, feasible only on tiny inputs.
#include "bsm/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace orc {

// Max over collections of pairwise disjoint integer intervals of
// sum (interval coefficient sum)^2. Coefficients given per position.
bsm::Rat james_sq(const std::map<long long, bsm::Rat>& x);

// Same maximization over pairwise node-disjoint tree segments (prefix
// chains s..t) inside the complete binary tree of the given depth.
bsm::Rat jt_sq(const std::map<std::string, bsm::Rat>& x, int depth);

// Largest number of pairwise node-disjoint segments whose coefficient sums
// satisfy sum^2 >= thr, same tree universe.
int jt_threshold_count(const std::map<std::string, bsm::Rat>& x, int depth,
                       const bsm::Rat& thr);

// Number of plegma families over the ground set: filter every l-tuple of
// k-subsets against the column conditions.
long long plegma_count(const std::vector<long long>& ground, int l, int k, bool strict);

// Norming supremum for small supports of the weighted two-line space: the
// averaging class with the heaviest admissible weight spans at least the
// first 256 within-line positions, so any second averaging set of a chain
// starts past global coordinate 511 and catches nothing. Only the unit
// coordinates and the one-line averages survive. Requires support <= 511.
bsm::Rat mr_small(const std::map<long long, bsm::Rat>& global_coeffs);

} // namespace orc
