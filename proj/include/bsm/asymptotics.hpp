#pragma once

#include "bsm/rational.hpp"
#include "bsm/vector.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace bsm {

// Norm evaluations carry the exact squared norm whenever the ambient admits
// one (l1, l2, the interval and tree square-function spaces); value is the
// norm itself in 50-digit floats for every ambient.
struct NormValue {
  bool exact = true;
  Rat sq;
  F50 value{0};
};

struct NormOracle {
  std::string ambient = "lp"; // lp | james | jt
  Rat p = Rat(2);

  NormValue eval(const FinVec& x) const;
};

// A rule (row i in 1..l, position n >= 1) -> vector in the fixed ambient.
struct SequenceGenerator {
  std::string name;
  int l = 1;
  bool normalized = true;
  NormOracle oracle;
  std::function<FinVec(int, long long)> at;
};

SequenceGenerator gen_lp_basis(const Rat& p, int l);
SequenceGenerator gen_l1_blocks(int l);
SequenceGenerator gen_james_pair();
SequenceGenerator gen_jt_level_block(int l);
SequenceGenerator gen_from_vectors(std::string name, NormOracle oracle,
                                   std::vector<std::vector<FinVec>> lists, bool normalized);

struct StabilizationSchedule {
  std::vector<Rat> deltas; // strictly decreasing positive prefix
};
StabilizationSchedule default_schedule(int k_max); // 1/2^k

struct CoeffNet {
  int l = 0, k = 0;
  std::vector<std::vector<std::vector<Rat>>> mats; // mats[m][i][j], entries in [-1,1]
};
// All -1/0/+1 patterns (minus the zero matrix) while their count stays within
// sign_cap, else the +-1 patterns; plus seeded random rational matrices.
CoeffNet default_net(int l, int k, unsigned long long seed = 7, int random_count = 200,
                     int sign_cap = 1024);

struct JsmRow {
  std::vector<std::vector<Rat>> a;
  NormValue rep;          // norm at the first gated family
  F50 osc{0};             // max - min norm over gated families
  bool osc_zero = false;  // all gated evaluations exactly equal
};

struct JsmEstimate {
  int l = 0;
  int k = 0;                              // largest stabilized k
  std::vector<long long> L;
  std::vector<std::vector<JsmRow>> table; // table[k-1], for k = 1..this->k
  std::vector<F50> osc_per_k;
  std::vector<std::pair<Rat, F50>> equiv; // candidate p -> equivalence estimate
  F50 suppression{0};
  bool suppression_set = false;
  std::string status; // stabilized | no gated families | not stabilized
  int failing_k = 0;
  std::string witness; // two families behind the failing oscillation
};

// Thins `ground` to L so that for each k <= k_max the norms of every net
// combination agree within sched.deltas[k-1] across all gated strict plegma
// families (gate: s_1(1) >= L(k)). Thinning is greedy single-element removal
// bounded by node_budget (default: half the ground); failure reports the
// smallest failing k and a witness pair instead of relaxing the gate.
JsmEstimate jsm_estimate(const SequenceGenerator& gen, int l, int k_max, const CoeffNet& net,
                         const StabilizationSchedule& sched, const std::vector<long long>& ground,
                         int node_budget = -1);

struct EquivEstimate {
  F50 value{0};
  bool exact = false;
  Rat sq; // value^2 when exact
};
// max over the k-table rows of max(||a||_p / N(a), N(a) / ||a||_p); a
// certified lower bound on the true equivalence constant, nondecreasing as
// the net refines.
EquivEstimate equivalence_constant(const JsmEstimate& table, const Rat& p);

struct SuppressionEstimate {
  F50 value{0};
  bool exact = false;
  Rat sq; // best ratio squared when exact
  std::string witness;
};
// max over nonempty proper subsets F and coefficient rows of
// ||sum_F a_v v|| / ||sum a_v v||; rows must match the vector count and may
// not be all zero; at most 16 vectors (subset enumeration).
SuppressionEstimate suppression_constant(const std::vector<FinVec>& vectors,
                                         const NormOracle& oracle,
                                         const std::vector<std::vector<Rat>>& coeff_rows);

struct LevelBlockBand {
  int lo = 0, hi = 0; // support depth range
};

struct LevelBlockFamily {
  std::vector<LevelBlockBand> bands;
  std::vector<std::vector<FinVec>> sets; // sets[n][i]: i-th vector of band n+1
  std::vector<Rat> eps_seq;              // strictly decreasing positive
  Rat eps;                               // upper ratio budget: (sqrt 2 + eps)^2
  Rat cert_ii; // prefix value of sum_n 2^{q_n} sum_{i>=n} (i+1) eps_i, tail zero
};

// Star layout: band 1 anchors at depth 1, band n >= 2 under disjoint
// subtrees per anchor, supports at depth 2n-1. Every root path meets at most
// one band beyond its anchor, so the separation hypothesis holds with room;
// variant varies support sizes and signs deterministically.
LevelBlockFamily build_level_block_family(int depth_budget, int n_families, int l,
                                          int variant = 0);

struct LevelBlockCheck {
  Rat lower, upper; // bounds on ||sum a_i x_i||^2 / sum a_i^2 over selections
  int selections = 0;
};

// Validates the family invariants (named error on violation), evaluates the
// squared ratio for every selection of one vector per band with the exact
// tree oracle, and asserts lower >= 1, upper <= (sqrt 2 + eps)^2.
LevelBlockCheck level_block_check(const LevelBlockFamily& fam, const std::vector<Rat>& coeffs);

} // namespace bsm
