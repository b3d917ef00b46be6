#pragma once

#include "bsm/vector.hpp"

#include <string>
#include <vector>

namespace bsm {

// Codomain norms the gap solvers understand.
//   ell1     : sum of absolute coordinates
//   sup      : max absolute coordinate
//   slot_max : max over mixed_sum slots of the slot l2 norm (Y-part join)
//   slot_pq  : slots carry l_p and join in l_q
enum class GapNorm { ell1, sup, slot_max, slot_pq };

// Finite operator: truncated domain basis plus the image of each basis
// vector. The named constructors below expand their structured rules into
// columns, so rule and matrix agree by construction; apply() is the matrix
// action and rejects coordinates outside the truncation.
struct OperatorModel {
  std::string name;
  IndexScheme domain, codomain;
  std::vector<Index> basis;    // canonical order
  std::vector<FinVec> columns; // one image per basis vector

  FinVec apply(const FinVec& x) const;
};

// Sums x_{2n-1} onto e_1 and x_{2n} onto e_2 over the truncation 1..2m.
OperatorModel op_fold_sum(long long m);
// Rank-one multiple of z = (z1, z2): the full coordinate sum (plus) or the
// odd-minus-even sum (minus) times z.
OperatorModel op_fold_rank(const Rat& z1, const Rat& z2, bool plus, long long m);
// Slot selector on block n of the two-part scheme: keeps the slots listed in
// G (subset of 1..2n), moving part 0 to part 1; inner coordinates 1..inner.
OperatorModel op_slot_selector(int n, const std::vector<int>& G, int inner);
// 2x2 rank-one y -> xstar(y) x on natural coordinates {1, 2}.
OperatorModel op_rank_one(const Rat& xs1, const Rat& xs2, const Rat& x1, const Rat& x2);
OperatorModel op_identity2();

// All size-k subsets of {1..total} in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(int total, int k);

struct ConvexCombination {
  std::vector<OperatorModel> points;
  std::vector<Rat> weights; // nonnegative, sum exactly 1
};
// Validates the simplex constraint, then applies sum_i w_i points_i.
FinVec combo_apply(const ConvexCombination& c, const FinVec& x);

struct GapValue {
  bool exact = false;
  Rat value;                    // meaningful when exact
  F50 value_f{0};               // always set
  std::vector<Rat> lambda;      // minimizing combination (exact path)
  std::vector<double> lambda_d; // minimizing combination (descent path)
};

// min over the hull simplex of ||(A - sum_i lambda_i B_i) x|| in the chosen
// codomain norm. ell1, sup and slot-parallel slot instances solve an exact
// rational LP; remaining slot instances run projected-subgradient descent
// (20 restarts, relative stop 1e-12).
GapValue pointwise_gap(const OperatorModel& A, const std::vector<OperatorModel>& hull,
                       const FinVec& x, GapNorm norm, const Rat& p = Rat(2),
                       const Rat& q = Rat(2), unsigned long long seed = 1);

// min over the simplex of the max over witnesses of ||(A - B_lambda) w||: a
// certified lower bound on inf over the hull of the restricted operator norm
// for any subspace containing the witnesses.
GapValue minimax_gap(const OperatorModel& A, const std::vector<OperatorModel>& hull,
                     const std::vector<FinVec>& witnesses, GapNorm norm,
                     const Rat& p = Rat(2), const Rat& q = Rat(2),
                     unsigned long long seed = 1);

// Least slot whose coverage under the combination is <= 1/2. One always
// exists: half-size selectors make the average coverage exactly 1/2.
struct PigeonholeWitness {
  int slot = 0;
  Rat coverage;
};
PigeonholeWitness pigeonhole_witness(const std::vector<std::vector<int>>& G,
                                     const std::vector<Rat>& lambda, int n);

struct GapReport {
  std::string case_name;
  long long n = 0;
  Rat p, q;
  int probes = 0;
  unsigned long long seed = 0;

  std::vector<std::pair<std::string, std::string>> pointwise; // probe -> gap
  bool pointwise_exact = true;
  Rat pointwise_worst;      // worst pointwise gap (exact path)
  F50 pointwise_worst_f{0}; // always set
  std::string pointwise_bound;
  bool pointwise_pass = false;

  std::vector<std::string> witnesses;
  bool minimax_exact = true;
  Rat minimax_lower; // LP value over the report hull when exact
  F50 minimax_lower_f{0};
  bool sampled_exact = true;
  Rat sampled_min; // worst per-combination certificate over sampled mixes
  F50 sampled_min_f{0};
  std::string minimax_bound;
  bool minimax_pass = false;

  bool upper_exact = true;
  Rat upper; // restricted norm at the minimizing combination
  F50 upper_f{0};
  std::vector<Rat> lambda; // minimizing combination over the report hull
  std::vector<std::string> notes;
  bool pass = false;
};

struct CaseParams {
  long long n = 3; // ell1: even half-width of the truncation; calx/mixed: block
  Rat p = Rat(3, 2), q = Rat(3);
  int probes = 200;
  unsigned long long seed = 1;
};

// Runs one named construction end to end: builds the operator and hull,
// demonstrates the pointwise approximation on extreme plus random probes
// with the case's constructive selector, then certifies the subspace-gap
// lower bound through witnesses. Names: ell1, calx, mixed, rank_one.
GapReport verify_case(const std::string& name, const CaseParams& prm);

} // namespace bsm
