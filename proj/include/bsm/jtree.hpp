#pragma once

#include "bsm/vector.hpp"

namespace bsm {

// Dyadic tree nodes are binary strings; "" is the root, depth = length.
inline bool node_is_prefix(const std::string& s, const std::string& t) {
  return s.size() <= t.size() && t.compare(0, s.size(), s) == 0;
}

struct JtNorm {
  Rat sq; // squared norm
  std::vector<std::pair<std::string, std::string>> segments; // disjoint s -> t paths
  std::vector<Rat> sums;
};

// sup over collections of pairwise node-disjoint segments of
// sum (segment coefficient sum)^2, computed exactly by a chain DP over the
// ancestor closure of the support.
JtNorm jt_norm_sq(const FinVec& x);

// Band projection: keeps nodes with depth in [m, n].
FinVec jt_band_project(const FinVec& x, int m, int n);

struct JtThresholdFamily {
  std::vector<std::pair<std::string, std::string>> segments;
  std::vector<Rat> sums; // raw segment sums of x, each with sum^2 >= eps^2 ||x||^2
};

// Maximum-cardinality family of pairwise disjoint segments whose sums on the
// exactly scaled vector x / ||x|| reach eps in absolute value, i.e.
// (segment sum)^2 >= eps^2 * jt_norm_sq(x). On a normalized vector the family
// size is bounded by 1/eps^2.
JtThresholdFamily jt_threshold_family(const FinVec& x, const Rat& eps);

} // namespace bsm
