#include "doctest.h"

#include "bsm/calx.hpp"
#include "bsm/report.hpp"

#include <cmath>

using namespace bsm;

namespace {

FinVec mixed_vec(std::initializer_list<std::tuple<long long, int, long long, long long, Rat>> entries) {
  FinVec v;
  v.scheme.kind = SchemeKind::mixed_sum;
  for (const auto& [n, part, j, m, c] : entries)
    v.entries.push_back({Index::mixed(n, part, j, m), c});
  fv_normalize(v);
  return v;
}

F50 direct_norm_sq(const FinVec& x) {
  // straight from the formula, per block: (sum_j ||X slot||)^2 + (max ||Y slot||)^2
  std::map<long long, std::map<std::pair<int, long long>, F50>> blocks;
  for (const auto& [ix, a] : x.entries)
    blocks[ix.v[0]][{static_cast<int>(ix.v[1]), ix.v[2]}] += to_f50(a) * to_f50(a);
  F50 total = 0;
  for (const auto& [n, slots] : blocks) {
    F50 xsum = 0, ymax = 0;
    for (const auto& [key, sq] : slots) {
      if (key.first == 0)
        xsum += sqrt(sq);
      else
        ymax = std::max(ymax, sq);
    }
    total += xsum * xsum + ymax;
  }
  return total;
}

} // namespace

TEST_CASE("radical sums stay exact under arithmetic") {
  RadicalSum two = RadicalSum::of_sqrt(Rat(4));
  CHECK(two.is_rational());
  CHECK(two == RadicalSum::of_rat(Rat(2)));

  RadicalSum r2 = RadicalSum::of_sqrt(Rat(2));
  CHECK_FALSE(r2.is_rational());
  CHECK((r2 * r2) == RadicalSum::of_rat(Rat(2)));

  // (1 + sqrt 2)(1 - sqrt 2) = -1
  RadicalSum a = RadicalSum::of_rat(Rat(1)) + r2;
  RadicalSum b = RadicalSum::of_rat(Rat(1)) - r2;
  CHECK((a * b) == RadicalSum::of_rat(Rat(-1)));

  // sqrt 2 + sqrt 8 = 3 sqrt 2
  CHECK((r2 + RadicalSum::of_sqrt(Rat(8))) == r2 * Rat(3));

  CHECK((r2 - RadicalSum::of_rat(Rat(1))).sign() == 1);
  CHECK((RadicalSum::of_rat(Rat(3, 2)) - r2).sign() == 1);
  CHECK(RadicalSum::cmp(r2, RadicalSum::of_sqrt(Rat(3))) < 0);

  // sqrt(9/4) collapses to the rational 3/2
  CHECK(RadicalSum::of_sqrt(Rat(9, 4)) == RadicalSum::of_rat(Rat(3, 2)));
}

TEST_CASE("block norm squares match the per block formula") {
  // single unit slot
  CHECK(calx_norm_sq(mixed_vec({{1, 0, 1, 1, Rat(1)}})).value ==
        RadicalSum::of_rat(Rat(1)));

  // two unit X slots add before squaring
  CHECK(calx_norm_sq(mixed_vec({{1, 0, 1, 1, Rat(1)}, {1, 0, 2, 1, Rat(1)}})).value ==
        RadicalSum::of_rat(Rat(4)));

  // two unit Y slots only max
  CHECK(calx_norm_sq(mixed_vec({{1, 1, 1, 1, Rat(1)}, {1, 1, 2, 1, Rat(1)}})).value ==
        RadicalSum::of_rat(Rat(1)));

  // X slots (3) and (4) plus a Y slot (2): (3+4)^2 + 2^2 = 53
  FinVec probe = mixed_vec({{1, 0, 1, 1, Rat(3)}, {1, 0, 2, 1, Rat(4)}, {1, 1, 1, 1, Rat(2)}});
  CalxNormSq fifty_three = calx_norm_sq(probe);
  CHECK(fifty_three.value == RadicalSum::of_rat(Rat(53)));
  CHECK(fifty_three.decimal == "53.000000000000");

  // in-slot l2 makes the cross term a genuine radical:
  // slots sqrt(2) and 1 give (sqrt 2 + 1)^2 = 3 + 2 sqrt 2
  FinVec surd = mixed_vec({{1, 0, 1, 1, Rat(1)}, {1, 0, 1, 2, Rat(1)}, {1, 0, 2, 1, Rat(1)}});
  RadicalSum expected = RadicalSum::of_rat(Rat(3)) + RadicalSum::of_sqrt(Rat(2)) * Rat(2);
  CHECK(calx_norm_sq(surd).value == expected);
  CHECK_FALSE(calx_norm_sq(surd).value.is_rational());

  // blocks combine additively
  FinVec twob = mixed_vec({{1, 0, 1, 1, Rat(3)}, {2, 0, 1, 1, Rat(4)}});
  CHECK(calx_norm_sq(twob).value == RadicalSum::of_rat(Rat(25)));

  FinVec wrong;
  wrong.scheme.kind = SchemeKind::natural;
  CHECK_THROWS_AS(calx_norm_sq(wrong), std::invalid_argument);

  FinVec bad_slot;
  bad_slot.scheme.kind = SchemeKind::mixed_sum;
  Index raw;
  raw.v = {1, 0, 99, 1}; // slot past 2n, bypassing the checked constructor
  bad_slot.entries.push_back({raw, Rat(1)});
  CHECK_THROWS_AS(calx_norm_sq(bad_slot), std::invalid_argument);
}

TEST_CASE("exact values agree with the direct float evaluation") {
  Rng rng(777);
  for (int trial = 0; trial < 120; ++trial) {
    FinVec v;
    v.scheme.kind = SchemeKind::mixed_sum;
    int supp = static_cast<int>(rng.uniform(1, 8));
    for (int i = 0; i < supp; ++i) {
      long long n = rng.uniform(1, 3);
      v.entries.push_back({Index::mixed(n, static_cast<int>(rng.uniform(0, 1)),
                                        rng.uniform(1, 2 * n), rng.uniform(1, 3)),
                           rng.rational(5, 4)});
    }
    fv_normalize(v);
    CalxNormSq got = calx_norm_sq(v);
    F50 want = direct_norm_sq(v);
    CHECK(abs(got.value.to_f50() - want) < F50("1e-40"));
  }
}

TEST_CASE("slot square roots demand perfect squares") {
  CHECK(slot_norm_exact(Rat(9, 4)) == Rat(3, 2));
  CHECK(slot_norm_exact(Rat(0)) == Rat(0));
  CHECK(slot_norm_exact(Rat(49)) == Rat(7));
  CHECK_THROWS_AS(slot_norm_exact(Rat(2)), std::domain_error);
  CHECK_THROWS_AS(slot_norm_exact(Rat(1, 3)), std::domain_error);
  CHECK_THROWS_AS(slot_norm_exact(Rat(-4)), std::domain_error);
}

TEST_CASE("two level exponent norms cover the exact and float regimes") {
  FinVec probe = mixed_vec({{1, 0, 1, 1, Rat(3)}, {1, 0, 2, 1, Rat(-4)}, {1, 1, 1, 1, Rat(2)}});

  MixedNorm l1 = mixed_pq_norm(probe, Rat(1), Rat(1));
  CHECK(l1.exact);
  CHECK(l1.decimal == "9.000000000000");

  MixedNorm l2 = mixed_pq_norm(probe, Rat(2), Rat(2));
  CHECK(l2.exact);
  CHECK(l2.decimal == "5.385164807134"); // sqrt 29

  // p = 2, q = 1: slot l2 norms add, radicals and all
  FinVec surd = mixed_vec({{1, 0, 1, 1, Rat(1)}, {1, 0, 1, 2, Rat(1)}, {1, 0, 2, 1, Rat(1)}});
  MixedNorm sum_of_roots = mixed_pq_norm(surd, Rat(2), Rat(1));
  CHECK(sum_of_roots.exact);
  CHECK(abs(sum_of_roots.value - (sqrt(F50(2)) + 1)) < F50("1e-45"));

  // p = 1, q = 2: slot sums join in l2
  MixedNorm q2 = mixed_pq_norm(surd, Rat(1), Rat(2));
  CHECK(q2.exact);
  CHECK(q2.decimal == "2.236067977499"); // sqrt(2^2 + 1), truncated not rounded

  // fractional exponents: two unit slots under q = 3 give 2^(1/3)
  FinVec units = mixed_vec({{1, 0, 1, 1, Rat(1)}, {1, 0, 2, 1, Rat(1)}});
  MixedNorm cube = mixed_pq_norm(units, Rat(3, 2), Rat(3));
  CHECK_FALSE(cube.exact);
  CHECK(cube.decimal == "1.259921049895");

  // exponent consistency under p = q: matches the flat l_p norm
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    FinVec v;
    v.scheme.kind = SchemeKind::mixed_sum;
    int supp = static_cast<int>(rng.uniform(1, 6));
    for (int i = 0; i < supp; ++i) {
      long long n = rng.uniform(1, 2);
      v.entries.push_back({Index::mixed(n, static_cast<int>(rng.uniform(0, 1)),
                                        rng.uniform(1, 2 * n), rng.uniform(1, 2)),
                           rng.rational(4, 3)});
    }
    fv_normalize(v);
    MixedNorm flat = mixed_pq_norm(v, Rat(3), Rat(3));
    F50 want = 0;
    for (const auto& [ix, a] : v.entries) want += pow(abs(to_f50(a)), F50(3));
    want = pow(want, F50(1) / 3);
    CHECK(abs(flat.value - want) < F50("1e-40"));

    // monotone in q for fixed p: higher q never increases the join
    MixedNorm lo = mixed_pq_norm(v, Rat(2), Rat(1));
    MixedNorm hi = mixed_pq_norm(v, Rat(2), Rat(3));
    CHECK(hi.value <= lo.value + F50("1e-40"));
  }

  CHECK_THROWS_AS(mixed_pq_norm(probe, Rat(1, 2), Rat(2)), std::invalid_argument);
  CHECK_THROWS_AS(mixed_pq_norm(probe, Rat(2), Rat(0)), std::invalid_argument);
  FinVec wrong;
  wrong.scheme.kind = SchemeKind::interleaved;
  wrong.scheme.l = 2;
  CHECK_THROWS_AS(mixed_pq_norm(wrong, Rat(2), Rat(2)), std::invalid_argument);
}
