#pragma once

#include "bsm/bignat.hpp"
#include "bsm/rational.hpp"

#include <array>
#include <optional>
#include <variant>
#include <vector>

namespace bsm {

enum class SchemeKind { natural, dyadic, interleaved, mixed_sum, mr_line };

struct IndexScheme {
  SchemeKind kind = SchemeKind::natural;
  int l = 0; // interleaved only: number of rows, >= 1

  friend bool operator==(const IndexScheme& a, const IndexScheme& b) {
    return a.kind == b.kind && (a.kind != SchemeKind::interleaved || a.l == b.l);
  }
  friend bool operator!=(const IndexScheme& a, const IndexScheme& b) { return !(a == b); }
};

// One coordinate index under a scheme:
//   natural / mr_line : n >= 1 in v[0]
//   interleaved       : row i in v[0] (1..l), position n in v[1]
//   mixed_sum         : block n in v[0], part 0=X 1=Y in v[1], slot j in v[2], inner m in v[3]
//   dyadic            : binary string node, "" is the root
struct Index {
  std::array<long long, 4> v{0, 0, 0, 0};
  std::string node;

  static Index nat(long long n) { Index ix; ix.v[0] = n; return ix; }
  static Index dyadic(std::string s) { Index ix; ix.node = std::move(s); return ix; }
  static Index inter(long long i, long long n) { Index ix; ix.v[0] = i; ix.v[1] = n; return ix; }
  static Index mixed(long long n, int part, long long j, long long m) {
    Index ix; ix.v = {n, part, j, m}; return ix;
  }
};

// Canonical coordinate order; interleaved uses (n, i) so enumeration in this
// order matches the usual flattening of doubly indexed arrays.
int index_cmp(const IndexScheme& sch, const Index& a, const Index& b);
void index_validate(const IndexScheme& sch, const Index& ix);

struct FinVec {
  IndexScheme scheme;
  std::vector<std::pair<Index, Rat>> entries; // canonically sorted, coefficients nonzero

  bool empty() const { return entries.empty(); }
};

void fv_normalize(FinVec& v);
FinVec fv_add(const FinVec& a, const FinVec& b);
FinVec fv_scale(const FinVec& a, const Rat& c);
FinVec fv_axpy(const Rat& c, const FinVec& x, const FinVec& y); // c*x + y
Rat fv_coeff(const FinVec& v, const Index& ix);
Rat fv_lp_sum(const FinVec& v, unsigned p);           // sum |a|^p (p >= 1 integer)
Rat fv_sup_abs(const FinVec& v);                      // max |a|

// Run of identical coefficients within one line of the mr_line scheme.
// Positions are within-line (line 1 holds the odd naturals, line 2 the even
// ones); coefficient is scalar, or scalar / m_weight when inv_weight is set.
struct RleRun {
  int line = 1;
  BigNat start;
  BigNat len;
  Rat scalar;
  std::optional<BigNat> inv_weight;

  BigNat end() const { return start + len - Int(1); } // inclusive
};

struct RleVec {
  std::vector<RleRun> runs; // sorted by (line, start), disjoint within a line
};

void rle_normalize(RleVec& v);
RleVec rle_scale(const RleVec& v, const Rat& c);
RleVec rle_add_aligned(const RleVec& a, const RleVec& b); // identical run geometry or disjoint
// Restriction to within-line positions [lo, hi] of `line`; other lines kept.
// Partial cuts require literal geometry.
RleVec rle_restrict(const RleVec& v, int line, const BigNat& lo, const BigNat& hi);
// Sum of coefficients times lengths; requires literal weights.
Rat rle_sum(const RleVec& v);
// Expansion to a FinVec over global mr_line coordinates; requires the total
// support to be literal and small.
FinVec rle_to_finvec(const RleVec& v, unsigned long long max_coords = 1u << 20);

// JSON vector documents. Deserialization validates scheme/index/coefficient
// shape and throws std::invalid_argument with the offending path.
using AnyVec = std::variant<FinVec, RleVec>;
std::string vec_write(const FinVec& v);
std::string vec_write(const RleVec& v);
AnyVec vec_read(const std::string& json_text);

} // namespace bsm
