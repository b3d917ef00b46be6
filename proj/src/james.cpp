#include "bsm/james.hpp"

namespace bsm {

JamesNorm james_norm_sq(const FinVec& x) {
  if (x.scheme.kind != SchemeKind::natural && x.scheme.kind != SchemeKind::mr_line)
    throw std::invalid_argument("james_norm_sq needs a natural-indexed vector");
  JamesNorm out;
  out.sq = 0;
  const auto& e = x.entries; // sorted by position
  size_t m = e.size();
  if (m == 0) return out;

  std::vector<Rat> pre(m + 1);
  for (size_t i = 0; i < m; ++i) pre[i + 1] = pre[i] + e[i].second;

  // f[t]: best over support suffix t..m-1. take[t] = u means interval t..u,
  // take[t] = -1 means t skipped.
  std::vector<Rat> f(m + 1);
  std::vector<long long> take(m, -1);
  for (size_t ti = m; ti-- > 0;) {
    f[ti] = f[ti + 1];
    take[ti] = -1;
    for (size_t u = ti; u < m; ++u) {
      Rat s = pre[u + 1] - pre[ti];
      Rat cand = s * s + f[u + 1];
      if (cand > f[ti]) {
        f[ti] = cand;
        take[ti] = static_cast<long long>(u);
      }
    }
  }
  out.sq = f[0];
  size_t t = 0;
  while (t < m) {
    if (take[t] < 0) {
      ++t;
      continue;
    }
    size_t u = static_cast<size_t>(take[t]);
    Rat s = pre[u + 1] - pre[t];
    if (s != 0) {
      out.intervals.push_back({e[t].first.v[0], e[u].first.v[0]});
      out.sums.push_back(s);
    }
    t = u + 1;
  }
  return out;
}

FinVec fv_restrict_natural(const FinVec& x, long long lo, long long hi) {
  if (x.scheme.kind != SchemeKind::natural && x.scheme.kind != SchemeKind::mr_line)
    throw std::invalid_argument("interval restriction needs a natural-indexed vector");
  FinVec out;
  out.scheme = x.scheme;
  for (const auto& ent : x.entries)
    if (ent.first.v[0] >= lo && ent.first.v[0] <= hi) out.entries.push_back(ent);
  return out;
}

FinVec james_pair_vector(int i, long long n) {
  if (i != 1 && i != 2) throw std::invalid_argument("row must be 1 or 2");
  if (n < 1) throw std::invalid_argument("position must be >= 1");
  FinVec v;
  v.scheme.kind = SchemeKind::natural;
  if (i == 1) {
    v.entries = {{Index::nat(1), Rat(1)}, {Index::nat(2 * n), Rat(1)}};
  } else {
    v.entries = {{Index::nat(1), Rat(-1)}, {Index::nat(2 * n + 1), Rat(1)}};
  }
  fv_normalize(v);
  return v;
}

FinVec james_materialize(const FinVec& interleaved) {
  if (interleaved.scheme.kind != SchemeKind::interleaved || interleaved.scheme.l != 2)
    throw std::invalid_argument("james_materialize needs an interleaved vector with l = 2");
  FinVec out;
  out.scheme.kind = SchemeKind::natural;
  for (const auto& [ix, c] : interleaved.entries) {
    FinVec base = james_pair_vector(static_cast<int>(ix.v[0]), ix.v[1]);
    out = fv_axpy(c, base, out);
  }
  return out;
}

} // namespace bsm
