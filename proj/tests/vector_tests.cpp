#include "doctest.h"

#include "bsm/bignat.hpp"
#include "bsm/report.hpp"
#include "bsm/vector.hpp"

using namespace bsm;

namespace {

FinVec random_vec(Rng& rng, SchemeKind kind, int entries) {
  FinVec v;
  v.scheme.kind = kind;
  if (kind == SchemeKind::interleaved) v.scheme.l = 3;
  for (int i = 0; i < entries; ++i) {
    Index ix;
    switch (kind) {
      case SchemeKind::natural:
      case SchemeKind::mr_line:
        ix = Index::nat(rng.uniform(1, 20));
        break;
      case SchemeKind::interleaved:
        ix = Index::inter(rng.uniform(1, 3), rng.uniform(1, 9));
        break;
      case SchemeKind::mixed_sum: {
        long long n = rng.uniform(1, 3);
        ix = Index::mixed(n, static_cast<int>(rng.uniform(0, 1)),
                          rng.uniform(1, 2 * n), rng.uniform(1, 4));
        break;
      }
      case SchemeKind::dyadic: {
        std::string node;
        int d = static_cast<int>(rng.uniform(0, 4));
        for (int j = 0; j < d; ++j) node.push_back(rng.uniform(0, 1) ? '1' : '0');
        ix = Index::dyadic(node);
        break;
      }
    }
    v.entries.push_back({ix, rng.rational(6, 4)});
  }
  fv_normalize(v);
  return v;
}

const SchemeKind kAllKinds[] = {SchemeKind::natural, SchemeKind::dyadic,
                                SchemeKind::interleaved, SchemeKind::mixed_sum,
                                SchemeKind::mr_line};

bool same_entries(const FinVec& a, const FinVec& b) {
  if (!(a.scheme == b.scheme) || a.entries.size() != b.entries.size()) return false;
  for (size_t i = 0; i < a.entries.size(); ++i) {
    if (index_cmp(a.scheme, a.entries[i].first, b.entries[i].first) != 0) return false;
    if (a.entries[i].second != b.entries[i].second) return false;
  }
  return true;
}

} // namespace

TEST_CASE("normalization sorts canonically and drops zeros") {
  Rng rng(11);
  for (SchemeKind kind : kAllKinds) {
    for (int trial = 0; trial < 30; ++trial) {
      FinVec v = random_vec(rng, kind, 8);
      for (size_t i = 1; i < v.entries.size(); ++i)
        CHECK(index_cmp(v.scheme, v.entries[i - 1].first, v.entries[i].first) < 0);
      for (const auto& [ix, c] : v.entries) CHECK(c != 0);
    }
  }
}

TEST_CASE("vector arithmetic identities") {
  Rng rng(12);
  for (SchemeKind kind : kAllKinds) {
    for (int trial = 0; trial < 20; ++trial) {
      FinVec x = random_vec(rng, kind, 6), y = random_vec(rng, kind, 6);
      Rat c = rng.rational(5, 3);
      FinVec axpy = fv_axpy(c, x, y);
      FinVec manual = fv_add(fv_scale(x, c), y);
      CHECK(same_entries(axpy, manual));
      CHECK(same_entries(fv_add(x, y), fv_add(y, x)));
      CHECK(same_entries(fv_scale(x, Rat(1)), x));
      CHECK(fv_add(x, fv_scale(x, Rat(-1))).entries.empty());
    }
  }
}

TEST_CASE("coefficient accessors agree with the entry list") {
  Rng rng(13);
  FinVec v = random_vec(rng, SchemeKind::natural, 10);
  Rat sup = 0, l1 = 0, l2 = 0;
  for (const auto& [ix, c] : v.entries) {
    CHECK(fv_coeff(v, ix) == c);
    Rat a = rat_abs(c);
    if (a > sup) sup = a;
    l1 += a;
    l2 += c * c;
  }
  CHECK(fv_sup_abs(v) == sup);
  CHECK(fv_lp_sum(v, 1) == l1);
  CHECK(fv_lp_sum(v, 2) == l2);
  CHECK(fv_coeff(v, Index::nat(999)) == Rat(0));
}

TEST_CASE("json documents round trip byte stably") {
  Rng rng(14);
  for (SchemeKind kind : kAllKinds) {
    for (int trial = 0; trial < 20; ++trial) {
      FinVec v = random_vec(rng, kind, 7);
      std::string doc = vec_write(v);
      AnyVec back = vec_read(doc);
      REQUIRE(std::holds_alternative<FinVec>(back));
      const FinVec& w = std::get<FinVec>(back);
      CHECK(w.scheme == v.scheme);
      CHECK(same_entries(w, v));
      CHECK(vec_write(w) == doc);
    }
  }
}

TEST_CASE("document validation points at the offense") {
  CHECK_THROWS_AS(vec_read("{"), std::invalid_argument);
  CHECK_THROWS_AS(vec_read("{\"entries\": []}"), std::invalid_argument);
  CHECK_THROWS_AS(vec_read(R"({"scheme": {"kind": "hex"}, "entries": []})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      vec_read(R"({"scheme": {"kind": "natural"}, "entries": [["a", "1"]]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      vec_read(R"({"scheme": {"kind": "natural"}, "entries": [[0, "1"]]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      vec_read(R"({"scheme": {"kind": "dyadic"}, "entries": [["2", "1"]]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      vec_read(R"({"scheme": {"kind": "mixed_sum"}, "entries": [[[1,"Z",1,1], "1"]]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      vec_read(R"({"scheme": {"kind": "natural"}, "runs": [[1, "1", "4", "1"]]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      vec_read(R"({"scheme": {"kind": "interleaved"}, "entries": []})"),
      std::invalid_argument); // missing l
}

TEST_CASE("big naturals round trip through decimal strings") {
  Rng rng(15);
  BigNat big = BigNat::pow2(BigNat(200)); // literal regime, power rendering
  CHECK(big.str() == "2^200");
  CHECK(BigNat::parse(big.str()) == big);
  BigNat wide = big + Int(7); // off the power, falls back to decimal
  CHECK(wide.str().size() == 61); // 2^200 + 7 has 61 digits
  CHECK(BigNat::parse(wide.str()) == wide);
  BigNat tower = BigNat::pow2(BigNat::pow2(BigNat(300)) + Int(5)); // symbolic
  CHECK(BigNat::parse(tower.str()) == tower);
  CHECK(tower > big);
  for (int trial = 0; trial < 50; ++trial) {
    BigNat a(static_cast<unsigned long long>(rng.uniform(0, 1'000'000'000)));
    CHECK(BigNat::parse(a.str()) == a);
  }
}

TEST_CASE("run length vectors: scale, aligned add, restrict, expand") {
  RleVec v;
  v.runs.push_back({1, BigNat(1), BigNat(64), Rat(1), std::nullopt});
  rle_normalize(v);

  RleVec cut = rle_restrict(v, 1, BigNat(17), BigNat(32));
  CHECK(rle_sum(cut) == Rat(16));

  RleVec doubled = rle_scale(v, Rat(2));
  CHECK(rle_sum(doubled) == Rat(128));

  RleVec both = rle_add_aligned(v, doubled);
  CHECK(rle_sum(both) == Rat(192));

  FinVec fv = rle_to_finvec(cut);
  CHECK(fv.entries.size() == 16);
  Rat total = 0;
  for (const auto& [ix, c] : fv.entries) total += c;
  CHECK(total == Rat(16));
  // line 1 positions p live at global coordinate 2p-1
  CHECK(fv.entries.front().first.v[0] == 33);

  std::string doc = vec_write(v);
  AnyVec back = vec_read(doc);
  REQUIRE(std::holds_alternative<RleVec>(back));
  CHECK(vec_write(std::get<RleVec>(back)) == doc);
}

TEST_CASE("restricting a run off its line keeps the other lines") {
  RleVec v;
  v.runs.push_back({1, BigNat(1), BigNat(8), Rat(1), std::nullopt});
  v.runs.push_back({2, BigNat(1), BigNat(8), Rat(3), std::nullopt});
  rle_normalize(v);
  RleVec cut = rle_restrict(v, 2, BigNat(3), BigNat(4));
  CHECK(rle_sum(cut) == Rat(8 + 6)); // full line 1 plus two scaled positions
}
