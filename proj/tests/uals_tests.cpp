#include "doctest.h"

#include "bsm/report.hpp"
#include "bsm/uals.hpp"

using namespace bsm;

namespace {

FinVec nat(std::initializer_list<std::pair<long long, Rat>> es) {
  FinVec v;
  v.scheme.kind = SchemeKind::natural;
  for (const auto& [i, c] : es) v.entries.push_back({Index::nat(i), c});
  fv_normalize(v);
  return v;
}

FinVec mone(long long n, int part, long long j, long long m, const Rat& c) {
  FinVec v;
  v.scheme.kind = SchemeKind::mixed_sum;
  v.entries.push_back({Index::mixed(n, part, j, m), c});
  fv_normalize(v);
  return v;
}

} // namespace

TEST_CASE("operator models act as their structured rules") {
  OperatorModel A = op_fold_sum(2);
  CHECK(A.basis.size() == 4);
  CHECK(A.columns.size() == 4);
  // odd coordinates land on e_1, even on e_2
  FinVec y = A.apply(nat({{3, Rat(1)}}));
  REQUIRE(y.entries.size() == 1);
  CHECK(y.entries[0].first.v[0] == 1);
  y = A.apply(nat({{1, Rat(1)}, {2, Rat(1)}, {4, Rat(2)}}));
  CHECK(fv_coeff(y, Index::nat(1)) == Rat(1));
  CHECK(fv_coeff(y, Index::nat(2)) == Rat(3));
  CHECK_THROWS_AS(A.apply(nat({{5, Rat(1)}})), std::invalid_argument);
  FinVec wrong;
  wrong.scheme.kind = SchemeKind::dyadic;
  CHECK_THROWS_AS(A.apply(wrong), std::invalid_argument);
  CHECK_THROWS_AS(op_fold_sum(0), std::invalid_argument);

  // rank-one fold: sum of coordinates times z
  OperatorModel F = op_fold_rank(Rat(1, 2), Rat(1, 3), true, 2);
  y = F.apply(nat({{1, Rat(1)}, {2, Rat(1)}}));
  CHECK(fv_coeff(y, Index::nat(1)) == Rat(1));
  CHECK(fv_coeff(y, Index::nat(2)) == Rat(2, 3));
  // minus variant weighs odd - even
  OperatorModel G = op_fold_rank(Rat(1), Rat(0), false, 2);
  y = G.apply(nat({{1, Rat(1)}, {2, Rat(1)}}));
  CHECK(y.entries.empty());

  // slot selector moves X slots in G to the Y part and drops the rest
  OperatorModel S = op_slot_selector(1, {1}, 2);
  CHECK(S.basis.size() == 4); // 2 slots x inner 2
  y = S.apply(mone(1, 0, 1, 1, Rat(1)));
  REQUIRE(y.entries.size() == 1);
  CHECK(y.entries[0].first.v[1] == 1);
  CHECK(S.apply(mone(1, 0, 2, 1, Rat(1))).entries.empty());
  CHECK_THROWS_AS(op_slot_selector(1, {1, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(op_slot_selector(1, {3}, 2), std::invalid_argument);
  CHECK_THROWS_AS(op_slot_selector(0, {1}, 2), std::invalid_argument);

  // 2x2 rank one and identity
  OperatorModel R = op_rank_one(Rat(1), Rat(1), Rat(1, 2), Rat(-1, 2));
  y = R.apply(nat({{1, Rat(1)}}));
  CHECK(fv_coeff(y, Index::nat(1)) == Rat(1, 2));
  CHECK(fv_coeff(y, Index::nat(2)) == Rat(-1, 2));
  OperatorModel I = op_identity2();
  FinVec x = nat({{1, Rat(2)}, {2, Rat(-3)}});
  FinVec ix = I.apply(x);
  CHECK(fv_coeff(ix, Index::nat(1)) == Rat(2));
  CHECK(fv_coeff(ix, Index::nat(2)) == Rat(-3));
}

TEST_CASE("subset enumeration is lexicographic and complete") {
  auto s = subsets_of_size(4, 2);
  REQUIRE(s.size() == 6);
  CHECK(s.front() == std::vector<int>{1, 2});
  CHECK(s[1] == std::vector<int>{1, 3});
  CHECK(s.back() == std::vector<int>{3, 4});
  CHECK(subsets_of_size(3, 0).size() == 1);
  CHECK(subsets_of_size(6, 3).size() == 20);
  for (const auto& sub : subsets_of_size(6, 3))
    for (size_t i = 1; i < sub.size(); ++i) CHECK(sub[i - 1] < sub[i]);
}

TEST_CASE("convex combinations enforce the simplex") {
  ConvexCombination c;
  c.points = {op_rank_one(Rat(1), Rat(0), Rat(1), Rat(0)),
              op_rank_one(Rat(0), Rat(1), Rat(0), Rat(1))};
  c.weights = {Rat(1, 2), Rat(1, 2)};
  FinVec y = combo_apply(c, nat({{1, Rat(1)}, {2, Rat(1)}}));
  CHECK(fv_coeff(y, Index::nat(1)) == Rat(1, 2));
  CHECK(fv_coeff(y, Index::nat(2)) == Rat(1, 2));

  c.weights = {Rat(1, 2), Rat(1, 3)};
  CHECK_THROWS_AS(combo_apply(c, nat({{1, Rat(1)}})), std::invalid_argument);
  c.weights = {Rat(3, 2), Rat(-1, 2)};
  CHECK_THROWS_AS(combo_apply(c, nat({{1, Rat(1)}})), std::invalid_argument);
  c.weights = {Rat(1)};
  CHECK_THROWS_AS(combo_apply(c, nat({{1, Rat(1)}})), std::invalid_argument);
}

TEST_CASE("pigeonhole always finds a half-covered slot") {
  auto G = subsets_of_size(4, 2);
  std::vector<Rat> uniform(G.size(), Rat(1, 6));
  PigeonholeWitness w = pigeonhole_witness(G, uniform, 2);
  CHECK(w.slot == 1);
  CHECK(w.coverage == Rat(1, 2));

  // concentrating on {1,2} leaves slot 3 uncovered
  std::vector<Rat> point(G.size(), Rat(0));
  point[0] = Rat(1);
  w = pigeonhole_witness(G, point, 2);
  CHECK(w.slot == 3);
  CHECK(w.coverage == Rat(0));

  // every simplex point on half-size selectors has some slot at or below 1/2
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rat> lam = rng.simplex_point(G.size());
    w = pigeonhole_witness(G, lam, 2);
    CHECK(w.coverage <= Rat(1, 2));
    CHECK(w.slot >= 1);
    CHECK(w.slot <= 4);
  }

  CHECK_THROWS_WITH_AS(pigeonhole_witness(G, uniform, 3),
                       "selector is not half-size", std::invalid_argument);
  CHECK_THROWS_WITH_AS(pigeonhole_witness({{1, 2}, {2, 5}}, {Rat(1, 2), Rat(1, 2)}, 2),
                       "malformed selector slot", std::invalid_argument);
}

TEST_CASE("pointwise gaps solve the exact rational program") {
  OperatorModel I = op_identity2();
  std::vector<OperatorModel> hull = {op_rank_one(Rat(1), Rat(0), Rat(1), Rat(0)),
                                     op_rank_one(Rat(0), Rat(1), Rat(0), Rat(1))};
  FinVec probe = nat({{1, Rat(1)}, {2, Rat(1)}});

  GapValue l1 = pointwise_gap(I, hull, probe, GapNorm::ell1);
  CHECK(l1.exact);
  CHECK(l1.value == Rat(1)); // mass conservation across the hull

  GapValue sup = pointwise_gap(I, hull, probe, GapNorm::sup);
  CHECK(sup.exact);
  CHECK(sup.value == Rat(1, 2));
  REQUIRE(sup.lambda.size() == 2);
  CHECK(sup.lambda[0] == Rat(1, 2));
  CHECK(sup.lambda[1] == Rat(1, 2));

  // a probe inside one ray is matched exactly
  GapValue zero = pointwise_gap(I, hull, nat({{1, Rat(1)}}), GapNorm::ell1);
  CHECK(zero.exact);
  CHECK(zero.value == Rat(0));

  CHECK_THROWS_AS(pointwise_gap(I, {}, probe, GapNorm::ell1), std::invalid_argument);
}

TEST_CASE("minimax certificates dominate their pointwise parts") {
  OperatorModel I = op_identity2();
  std::vector<OperatorModel> hull = {op_rank_one(Rat(1), Rat(0), Rat(1), Rat(0)),
                                     op_rank_one(Rat(0), Rat(1), Rat(0), Rat(1))};
  FinVec e1 = nat({{1, Rat(1)}});
  FinVec e2 = nat({{2, Rat(1)}});

  GapValue mm = minimax_gap(I, hull, {e1, e2}, GapNorm::ell1);
  CHECK(mm.exact);
  CHECK(mm.value == Rat(1, 2));

  for (const FinVec& w : {e1, e2}) {
    GapValue pw = pointwise_gap(I, hull, w, GapNorm::ell1);
    CHECK(pw.value <= mm.value);
  }

  CHECK_THROWS_AS(minimax_gap(I, hull, {}, GapNorm::ell1), std::invalid_argument);
}

TEST_CASE("slot norms split into parallel exact and descent regimes") {
  OperatorModel both = op_slot_selector(1, {1, 2}, 1);
  std::vector<OperatorModel> hull = {op_slot_selector(1, {1}, 1),
                                     op_slot_selector(1, {2}, 1)};
  FinVec x = fv_add(mone(1, 0, 1, 1, Rat(1)), mone(1, 0, 2, 1, Rat(1)));

  GapValue sm = pointwise_gap(both, hull, x, GapNorm::slot_max);
  CHECK(sm.exact);
  CHECK(sm.value == Rat(1, 2));

  // q = 3 join with singleton slots: ((1/2)^3 + (1/2)^3)^{1/3} = 2^{1/3}/2
  GapValue sp = pointwise_gap(both, hull, x, GapNorm::slot_pq, Rat(2), Rat(3));
  CHECK_FALSE(sp.exact);
  F50 want = pow(F50(2), F50(1) / 3) / 2;
  CHECK(abs(sp.value_f - want) < F50("1e-6"));
  // descent can only sit above the true minimum
  CHECK(sp.value_f >= want - F50("1e-9"));
}

TEST_CASE("case verifier meets its bounds on every construction") {
  CaseParams prm;
  prm.n = 2;
  prm.probes = 30;
  prm.seed = 3;

  GapReport ell1 = verify_case("ell1", prm);
  CHECK(ell1.pass);
  CHECK(ell1.pointwise_pass);
  CHECK(ell1.minimax_pass);
  CHECK(ell1.pointwise_exact);
  CHECK(ell1.pointwise_worst == Rat(0)); // the fold mix reproduces the operator
  CHECK(ell1.minimax_exact);
  CHECK(ell1.minimax_lower == Rat(1, 2));
  CHECK(ell1.upper == Rat(1));
  CHECK(ell1.witnesses.size() == 2);
  CHECK(ell1.pointwise.size() == 34); // four extreme probes plus the random ones
  CHECK(ell1.sampled_min == Rat(428, 811));

  GapReport calx = verify_case("calx", prm);
  CHECK(calx.pass);
  CHECK(calx.pointwise_worst == Rat(5, 17));
  CHECK(calx.minimax_lower == Rat(1, 2));
  CHECK(calx.upper == Rat(1, 2));
  CHECK(calx.witnesses.size() == 4);
  REQUIRE(calx.lambda.size() == 6); // one weight per half-size selector
  Rat lsum = 0;
  for (const auto& l : calx.lambda) {
    CHECK(l >= 0);
    lsum += l;
  }
  CHECK(lsum == Rat(1));

  GapReport mixed = verify_case("mixed", prm);
  CHECK(mixed.pass);
  CHECK_FALSE(mixed.pointwise_exact); // fractional exponents need floats
  CHECK(mixed.minimax_exact);
  CHECK(mixed.minimax_lower == Rat(1, 2));
  CHECK(mixed.upper == Rat(1, 2));

  GapReport rank = verify_case("rank_one", prm);
  CHECK(rank.pass);
  CHECK(rank.minimax_lower == Rat(1, 2));
  CHECK(rank.upper == Rat(1, 2));

  // reports are deterministic in (params, seed)
  GapReport again = verify_case("ell1", prm);
  CHECK(again.sampled_min == ell1.sampled_min);
  CHECK(again.pointwise == ell1.pointwise);

  CHECK_THROWS_AS(verify_case("frobnicate", prm), std::invalid_argument);
  CaseParams big = prm;
  big.n = 7;
  CHECK_THROWS_AS(verify_case("calx", big), std::invalid_argument);
  CaseParams odd = prm;
  odd.n = 3;
  CHECK_THROWS_AS(verify_case("ell1", odd), std::invalid_argument); // needs even
  CaseParams many = prm;
  many.probes = 6000;
  CHECK_THROWS_AS(verify_case("ell1", many), std::invalid_argument);
  CaseParams swapped = prm;
  swapped.p = Rat(3);
  swapped.q = Rat(3, 2);
  CHECK_THROWS_AS(verify_case("mixed", swapped), std::invalid_argument);
}
