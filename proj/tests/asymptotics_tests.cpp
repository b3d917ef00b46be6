#include "doctest.h"

#include "bsm/asymptotics.hpp"
#include "bsm/james.hpp"
#include "bsm/jtree.hpp"
#include "bsm/report.hpp"

using namespace bsm;

namespace {

FinVec nat(std::initializer_list<std::pair<long long, Rat>> es) {
  FinVec v;
  v.scheme.kind = SchemeKind::natural;
  for (const auto& [i, c] : es) v.entries.push_back({Index::nat(i), c});
  fv_normalize(v);
  return v;
}

FinVec dyt(std::initializer_list<std::pair<const char*, Rat>> es) {
  FinVec v;
  v.scheme.kind = SchemeKind::dyadic;
  for (const auto& [node, c] : es) v.entries.push_back({Index::dyadic(node), c});
  fv_normalize(v);
  return v;
}

std::vector<long long> iota_ground(long long n, long long step = 1) {
  std::vector<long long> g;
  for (long long i = 1; i <= n; ++i) g.push_back(i * step);
  return g;
}

bool close(const F50& a, const F50& b) { return abs(a - b) < F50("1e-40"); }

} // namespace

TEST_CASE("norm oracles are exact where the ambient allows") {
  NormOracle l2{"lp", Rat(2)};
  NormValue v = l2.eval(nat({{1, Rat(3)}, {2, Rat(4)}}));
  CHECK(v.exact);
  CHECK(v.sq == Rat(25));
  CHECK(close(v.value, F50(5)));

  NormOracle l1{"lp", Rat(1)};
  v = l1.eval(nat({{1, Rat(3)}, {2, Rat(-4)}}));
  CHECK(v.exact);
  CHECK(v.sq == Rat(49));

  NormOracle l3{"lp", Rat(3)};
  v = l3.eval(nat({{1, Rat(1)}, {2, Rat(1)}}));
  CHECK_FALSE(v.exact);
  CHECK(close(v.value, pow(F50(2), F50(1) / 3)));

  NormOracle jam{"james", Rat(2)};
  v = jam.eval(nat({{1, Rat(1)}, {2, Rat(1)}}));
  CHECK(v.exact);
  CHECK(v.sq == Rat(4));

  NormOracle jt{"jt", Rat(2)};
  v = jt.eval(dyt({{"0", Rat(1)}, {"1", Rat(-1)}}));
  CHECK(v.exact);
  CHECK(v.sq == Rat(2));

  CHECK_THROWS_AS(l2.eval(dyt({{"0", Rat(1)}})), std::invalid_argument);
  CHECK_THROWS_AS(jt.eval(nat({{1, Rat(1)}})), std::invalid_argument);
  CHECK_THROWS_AS((NormOracle{"hilbert", Rat(2)}.eval(nat({{1, Rat(1)}}))),
                  std::invalid_argument);
}

TEST_CASE("builtin generators emit unit vectors with guarded positions") {
  auto lp = gen_lp_basis(Rat(2), 2);
  CHECK(lp.l == 2);
  CHECK(lp.normalized);
  FinVec e = lp.at(1, 5);
  CHECK(e.entries.size() == 1);
  CHECK(lp.oracle.eval(e).sq == Rat(1));
  CHECK_THROWS_AS(lp.at(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(lp.at(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(lp.at(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_lp_basis(Rat(1, 2), 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_lp_basis(Rat(2), 0), std::invalid_argument);

  auto jp = gen_james_pair();
  CHECK(jp.l == 2);
  // row 1 rides e_{2n} + e_1 (interval [1, 2n] sums to 2), row 2 rides
  // e_{2n+1} - e_1 (only the singletons survive)
  CHECK(jp.oracle.eval(jp.at(1, 3)).sq == Rat(4));
  CHECK(jp.oracle.eval(jp.at(2, 3)).sq == Rat(2));
  CHECK_FALSE(jp.normalized);

  auto jt = gen_jt_level_block(2);
  CHECK(jt.normalized);
  CHECK(jt.oracle.eval(jt.at(1, 4)).sq == Rat(1));
  CHECK(jt.oracle.eval(jt.at(2, 4)).sq == Rat(1));
  CHECK_THROWS_AS(gen_jt_level_block(3), std::invalid_argument);

  auto l1b = gen_l1_blocks(2);
  CHECK(l1b.normalized);
  CHECK(l1b.oracle.eval(l1b.at(2, 7)).sq == Rat(1));

  // rows must not collide: distinct (i, n) pairs have disjoint supports
  for (const auto& gen : {lp, l1b}) {
    FinVec a = gen.at(1, 1), b = gen.at(2, 1), c = gen.at(1, 2);
    FinVec sum = fv_add(fv_add(a, b), c);
    CHECK(sum.entries.size() == a.entries.size() + b.entries.size() + c.entries.size());
  }
}

TEST_CASE("schedules and nets are deterministic with pinned shapes") {
  StabilizationSchedule sched = default_schedule(4);
  REQUIRE(sched.deltas.size() == 4);
  CHECK(sched.deltas[0] == Rat(1, 2));
  CHECK(sched.deltas[3] == Rat(1, 16));
  for (size_t i = 1; i < sched.deltas.size(); ++i)
    CHECK(sched.deltas[i] < sched.deltas[i - 1]);
  CHECK_THROWS_AS(default_schedule(0), std::invalid_argument);

  // full sign cube (3^{lk} - 1) plus 200 random matrices
  CHECK(default_net(1, 1).mats.size() == 202);
  CHECK(default_net(2, 2).mats.size() == 280);
  // past the cube cap it falls back to +-1 patterns
  CHECK(default_net(2, 4).mats.size() == 456);
  CHECK(default_net(2, 5).mats.size() == 1224);
  CHECK_THROWS_AS(default_net(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(default_net(0, 1), std::invalid_argument);

  CoeffNet net = default_net(2, 2, 7);
  for (const auto& m : net.mats) {
    REQUIRE(m.size() == 2);
    for (const auto& row : m) {
      REQUIRE(row.size() == 2);
      for (const auto& c : row) {
        CHECK(c >= Rat(-1));
        CHECK(c <= Rat(1));
      }
    }
  }

  // same seed, same net; the shorter random tail is a prefix of the longer
  CoeffNet again = default_net(2, 2, 7);
  CHECK(net.mats == again.mats);
  CoeffNet small = default_net(2, 2, 7, 50);
  REQUIRE(small.mats.size() < net.mats.size());
  for (size_t i = 0; i < small.mats.size(); ++i) CHECK(small.mats[i] == net.mats[i]);
  CHECK_FALSE(default_net(2, 2, 8).mats == net.mats);
}

TEST_CASE("spreading sequences stabilize with zero oscillation") {
  auto gen = gen_lp_basis(Rat(2), 1);
  JsmEstimate est = jsm_estimate(gen, 1, 2, default_net(1, 2, 1), default_schedule(2),
                                 iota_ground(10));
  CHECK(est.status == "stabilized");
  CHECK(est.k == 2);
  REQUIRE(est.table.size() == 2);
  CHECK(est.L.size() == 10); // nothing needed thinning
  for (const auto& o : est.osc_per_k) CHECK(close(o, F50(0)));
  for (const auto& rows : est.table)
    for (const auto& row : rows) CHECK(row.osc_zero);

  // equivalence against the candidate exponents: exact at p = 2
  EquivEstimate e2 = equivalence_constant(est, Rat(2));
  CHECK(e2.exact);
  CHECK(e2.sq == Rat(1));
  EquivEstimate e1 = equivalence_constant(est, Rat(1));
  CHECK(e1.exact);
  CHECK(e1.sq == Rat(2)); // row (1,1): l1 norm 2 vs l2 norm sqrt 2
  EquivEstimate e3 = equivalence_constant(est, Rat(3));
  CHECK_FALSE(e3.exact);
  CHECK(close(e3.value, pow(F50(2), F50(1) / 6)));

  CHECK(est.suppression_set);
  CHECK(close(est.suppression, F50(1)));

  // the same estimate through a sparse subsequence is indistinguishable
  JsmEstimate far = jsm_estimate(gen, 1, 2, default_net(1, 2, 1), default_schedule(2),
                                 iota_ground(10, 3));
  CHECK(far.status == "stabilized");
  REQUIRE(far.table[1].size() == est.table[1].size());
  for (size_t r = 0; r < far.table[1].size(); ++r)
    CHECK(far.table[1][r].rep.sq == est.table[1][r].rep.sq);
}

TEST_CASE("interval pair sequence keeps its gap and suppression square") {
  auto gen = gen_james_pair();
  JsmEstimate est = jsm_estimate(gen, 2, 2, default_net(2, 2, 1), default_schedule(2),
                                 iota_ground(10));
  CHECK(est.status == "stabilized");
  CHECK(est.k == 2);
  for (const auto& rows : est.table)
    for (const auto& row : rows) CHECK(row.osc_zero);

  EquivEstimate e2 = equivalence_constant(est, Rat(2));
  CHECK(e2.exact);
  CHECK(e2.sq == Rat(2056, 233));
  EquivEstimate e1 = equivalence_constant(est, Rat(1));
  CHECK(e1.exact);
  CHECK(e1.sq == Rat(4));

  CHECK(est.suppression_set);
  CHECK(close(est.suppression * est.suppression, F50(5) / 2));

  // refining the net never lowers the certified equivalence
  JsmEstimate coarse = jsm_estimate(gen, 2, 2, default_net(2, 2, 7, 50),
                                    default_schedule(2), iota_ground(10));
  JsmEstimate fine = jsm_estimate(gen, 2, 2, default_net(2, 2, 7, 200),
                                  default_schedule(2), iota_ground(10));
  for (const Rat& p : {Rat(1), Rat(3, 2), Rat(2), Rat(3)}) {
    F50 c = equivalence_constant(coarse, p).value;
    F50 f = equivalence_constant(fine, p).value;
    CHECK(c <= f + F50("1e-40"));
  }
}

TEST_CASE("block generators match their flat exponent laws") {
  {
    auto gen = gen_l1_blocks(2);
    JsmEstimate est = jsm_estimate(gen, 2, 2, default_net(2, 2, 1), default_schedule(2),
                                   iota_ground(10));
    CHECK(est.status == "stabilized");
    EquivEstimate e1 = equivalence_constant(est, Rat(1));
    CHECK(e1.exact);
    CHECK(e1.sq == Rat(1)); // blocks really are an l1 basis
    CHECK(equivalence_constant(est, Rat(2)).sq == Rat(4));
  }
  {
    auto gen = gen_jt_level_block(2);
    JsmEstimate est = jsm_estimate(gen, 2, 2, default_net(2, 2, 1), default_schedule(2),
                                   iota_ground(10));
    CHECK(est.status == "stabilized");
    EquivEstimate e2 = equivalence_constant(est, Rat(2));
    CHECK(e2.exact);
    CHECK(e2.sq == Rat(1)); // disjoint level blocks act like l2
    CHECK(est.suppression_set);
    CHECK(close(est.suppression, F50(1)));
  }
}

TEST_CASE("estimation reports failure honestly") {
  // ground too small to host any strict family at k = 2
  auto gen = gen_lp_basis(Rat(2), 2);
  JsmEstimate tiny = jsm_estimate(gen, 2, 2, default_net(2, 2, 1), default_schedule(2),
                                  {1, 2, 3});
  CHECK(tiny.status == "no gated families");
  CHECK(tiny.failing_k == 2);
  CHECK(tiny.k == 1);

  // one loud position, no removal budget: cannot stabilize, names a witness
  std::vector<std::vector<FinVec>> lists(1);
  lists[0] = {nat({{1, Rat(1)}}), nat({{2, Rat(2)}}), nat({{3, Rat(1)}}),
              nat({{4, Rat(1)}}), nat({{5, Rat(1)}})};
  auto bump = gen_from_vectors("bump", NormOracle{"lp", Rat(2)}, lists, false);
  JsmEstimate stuck = jsm_estimate(bump, 1, 2, default_net(1, 2, 1), default_schedule(2),
                                   iota_ground(5), 0);
  CHECK(stuck.status == "not stabilized");
  CHECK(stuck.failing_k == 1);
  CHECK(stuck.witness == "matrix -1; families (1) vs (2)");

  // with the default budget the loud position is thinned away instead
  JsmEstimate saved = jsm_estimate(bump, 1, 2, default_net(1, 2, 1), default_schedule(2),
                                   iota_ground(5));
  CHECK(saved.status == "stabilized");
  CHECK(saved.L.size() < 5);

  // claiming normalization without delivering it is an error
  std::vector<std::vector<FinVec>> lie(1);
  lie[0] = {nat({{1, Rat(1)}}), nat({{2, Rat(2)}})};
  auto liar = gen_from_vectors("lie", NormOracle{"lp", Rat(2)}, lie, true);
  CHECK_THROWS_AS(jsm_estimate(liar, 1, 1, default_net(1, 1, 1), default_schedule(1),
                               {1, 2}),
                  std::logic_error);

  // shape guards
  CHECK_THROWS_AS(jsm_estimate(gen, 1, 2, default_net(1, 2, 1), default_schedule(2),
                               iota_ground(6)),
                  std::invalid_argument); // l mismatch
  CHECK_THROWS_AS(jsm_estimate(gen, 2, 3, default_net(2, 2, 1), default_schedule(3),
                               iota_ground(8)),
                  std::invalid_argument); // net too narrow
  CHECK_THROWS_AS(jsm_estimate(gen, 2, 2, default_net(2, 2, 1), default_schedule(1),
                               iota_ground(8)),
                  std::invalid_argument); // schedule too short
  CHECK_THROWS_AS(jsm_estimate(gen, 2, 2, default_net(2, 2, 1), default_schedule(2),
                               {3, 2, 1}),
                  std::invalid_argument); // unsorted ground
}

TEST_CASE("suppression search is exhaustive over subsets") {
  NormOracle jt{"jt", Rat(2)};
  // overlapping supports let a partial sum beat the full one:
  // v1 = e_0, v2 = e_1 - e_0; total (1,1) = e_1 has norm 1, subset {2} has 2
  std::vector<FinVec> vs = {dyt({{"0", Rat(1)}}), dyt({{"0", Rat(-1)}, {"1", Rat(1)}})};
  SuppressionEstimate sup =
      suppression_constant(vs, jt, {{Rat(1), Rat(1)}, {Rat(1), Rat(0)}});
  CHECK(sup.exact);
  CHECK(sup.sq == Rat(2));
  CHECK(sup.witness == "row=0 mask=2");

  // orthogonal unit vectors cannot be suppressed past one
  NormOracle l2{"lp", Rat(2)};
  std::vector<FinVec> ortho = {nat({{1, Rat(1)}}), nat({{2, Rat(1)}})};
  SuppressionEstimate flat =
      suppression_constant(ortho, l2, {{Rat(1), Rat(1)}, {Rat(2), Rat(-1)}});
  CHECK(flat.exact);
  CHECK(flat.sq == Rat(4, 5)); // row (2,-1), subset {1}: 4 over 5
  SuppressionEstimate one =
      suppression_constant(ortho, l2, {{Rat(1), Rat(0)}});
  CHECK(one.sq == Rat(1)); // the live subset carries the whole norm

  CHECK_THROWS_AS(suppression_constant({}, l2, {{Rat(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(suppression_constant(ortho, l2, {}), std::invalid_argument);
  CHECK_THROWS_AS(suppression_constant(ortho, l2, {{Rat(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(suppression_constant(ortho, l2, {{Rat(0), Rat(0)}}),
                  std::invalid_argument);
  std::vector<FinVec> many(17, nat({{1, Rat(1)}}));
  CHECK_THROWS_AS(suppression_constant(many, l2, {{Rat(1)}}), std::invalid_argument);
}

TEST_CASE("level block families obey the certified ratio window") {
  LevelBlockFamily fam = build_level_block_family(12, 3, 2, 0);
  REQUIRE(fam.bands.size() == 3);
  CHECK(fam.eps == Rat(1, 16));
  CHECK(fam.eps_seq[0] == Rat(1, 262144)); // 4^{-9}
  for (size_t n = 1; n < fam.eps_seq.size(); ++n)
    CHECK(fam.eps_seq[n] == fam.eps_seq[n - 1] / 4);
  CHECK(fam.cert_ii == Rat(11, 131072));
  CHECK(build_level_block_family(12, 4, 1, 0).cert_ii == Rat(1129, 8388608));

  // bands sit at odd depths with strictly separated ranges
  for (size_t n = 0; n < fam.bands.size(); ++n) {
    CHECK(fam.bands[n].hi == 2 * static_cast<int>(n + 1) - 1);
    if (n > 0) CHECK(fam.bands[n].lo > fam.bands[n - 1].hi);
    CHECK(fam.sets[n].size() == 2);
  }

  LevelBlockCheck all1 = level_block_check(fam, {Rat(1), Rat(1), Rat(1)});
  CHECK(all1.selections == 8);
  CHECK(all1.lower == Rat(1));
  CHECK(all1.upper == Rat(5, 3));

  LevelBlockCheck half = level_block_check(fam, {Rat(1), Rat(-1), Rat(1, 2)});
  CHECK(half.lower == Rat(1));
  CHECK(half.upper == Rat(77, 45));

  // the ratio window never escapes [1, (sqrt 2 + eps)^2] on any variant
  Rat budget_sq = Rat(2) + fam.eps * fam.eps; // (sqrt 2 + eps)^2 = 2 + 2 sqrt 2 eps + eps^2
  F50 budget = to_f50(budget_sq) + 2 * sqrt(F50(2)) * to_f50(fam.eps);
  Rng rng(5);
  for (int variant = 0; variant <= 2; ++variant) {
    LevelBlockFamily f = build_level_block_family(12, 3, 2, variant);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<Rat> coeffs;
      bool zero = true;
      for (int i = 0; i < 3; ++i) {
        coeffs.push_back(rng.rational(3, 3));
        zero = zero && coeffs.back() == 0;
      }
      if (zero) coeffs[0] = Rat(1);
      LevelBlockCheck c = level_block_check(f, coeffs);
      CHECK(c.lower >= Rat(1));
      CHECK(to_f50(c.upper) <= budget);
    }
  }

  // named violations
  CHECK_THROWS_AS(level_block_check(fam, {Rat(1), Rat(1)}), std::invalid_argument);
  CHECK_THROWS_AS(level_block_check(fam, {Rat(0), Rat(0), Rat(0)}),
                  std::invalid_argument);
  LevelBlockFamily bad = fam;
  bad.eps_seq[2] = bad.eps_seq[0];
  CHECK_THROWS_AS(level_block_check(bad, {Rat(1), Rat(1), Rat(1)}),
                  std::invalid_argument);
  LevelBlockFamily shifted = fam;
  shifted.bands[1].lo = 0; // band 2 now claims depth 0, colliding with band 1
  CHECK_THROWS_AS(level_block_check(shifted, {Rat(1), Rat(1), Rat(1)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_level_block_family(3, 3, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_level_block_family(12, 0, 2, 0), std::invalid_argument);
}
