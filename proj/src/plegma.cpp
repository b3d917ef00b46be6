#include "bsm/plegma.hpp"

#include <algorithm>

namespace bsm {

PlegmaCheck plegma_validate(const PlegmaFamily& fam, bool strict) {
  PlegmaCheck out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.violation = std::move(msg);
    return out;
  };
  if (fam.rows.empty()) return fail("family has no rows");
  int k = fam.k();
  if (k == 0) return fail("rows are empty");
  for (int i = 0; i < fam.l(); ++i) {
    if (static_cast<int>(fam.rows[i].size()) != k)
      return fail("row " + std::to_string(i + 1) + " has mismatched length");
    for (int j = 0; j < k; ++j) {
      if (fam.rows[i][j] < 1)
        return fail("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                    ") is below 1");
      if (j > 0 && fam.rows[i][j] <= fam.rows[i][j - 1])
        return fail("row " + std::to_string(i + 1) + " is not strictly increasing at column " +
                    std::to_string(j + 1));
    }
  }
  for (int j = 0; j + 1 < k; ++j) {
    long long colmax = fam.rows[0][j], nextmin = fam.rows[0][j + 1];
    for (int i = 1; i < fam.l(); ++i) {
      colmax = std::max(colmax, fam.rows[i][j]);
      nextmin = std::min(nextmin, fam.rows[i][j + 1]);
    }
    if (colmax >= nextmin)
      return fail("column " + std::to_string(j + 1) + " does not precede column " +
                  std::to_string(j + 2));
  }
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i + 1 < fam.l(); ++i) {
      if (strict ? fam.rows[i][j] >= fam.rows[i + 1][j]
                 : fam.rows[i][j] > fam.rows[i + 1][j])
        return fail("column " + std::to_string(j + 1) + " rows " + std::to_string(i + 1) +
                    "," + std::to_string(i + 2) + (strict ? " not strictly increasing" : " decrease"));
    }
  }
  return out;
}

namespace {

// Column-by-column generation: each column is an (non)strict chain of l
// ground elements, every element past the previous column's maximum.
void gen_columns(const std::vector<long long>& ground, int l, int k, bool strict,
                 int col, size_t low, std::vector<std::vector<long long>>& cols,
                 std::vector<PlegmaFamily>& out) {
  if (col == k) {
    PlegmaFamily fam;
    fam.rows.assign(l, std::vector<long long>(k));
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < k; ++j) fam.rows[i][j] = cols[j][i];
    out.push_back(std::move(fam));
    return;
  }
  std::vector<size_t> pick(l);
  // choose indices low <= pick[0] <= ... (strict: <) into ground
  std::function<void(int, size_t)> rec = [&](int row, size_t from) {
    if (row == l) {
      std::vector<long long> column(l);
      for (int i = 0; i < l; ++i) column[i] = ground[pick[i]];
      cols[col] = column;
      gen_columns(ground, l, k, strict, col + 1, pick[l - 1] + 1, cols, out);
      return;
    }
    for (size_t t = from; t < ground.size(); ++t) {
      pick[row] = t;
      rec(row + 1, strict ? t + 1 : t);
    }
  };
  rec(0, low);
}

} // namespace

std::vector<PlegmaFamily> plegma_enumerate(const std::vector<long long>& ground,
                                           int l, int k, bool strict) {
  if (l < 1 || k < 1) throw std::invalid_argument("plegma_enumerate needs l,k >= 1");
  std::vector<long long> g = ground;
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  if (!g.empty() && g.front() < 1) throw std::invalid_argument("ground elements must be >= 1");
  std::vector<PlegmaFamily> out;
  std::vector<std::vector<long long>> cols(k);
  gen_columns(g, l, k, strict, 0, 0, cols, out);
  auto key = [](const PlegmaFamily& f) {
    std::vector<long long> flat;
    for (const auto& r : f.rows) flat.insert(flat.end(), r.begin(), r.end());
    return flat;
  };
  std::sort(out.begin(), out.end(),
            [&](const PlegmaFamily& a, const PlegmaFamily& b) { return key(a) < key(b); });
  return out;
}

FinVec plegma_shift(const FinVec& x, const PlegmaFamily& fam) {
  if (x.scheme.kind != SchemeKind::interleaved)
    throw std::invalid_argument("plegma_shift needs an interleaved vector");
  if (x.scheme.l != fam.l())
    throw std::invalid_argument("family row count does not match the vector's l");
  auto check = plegma_validate(fam, false);
  if (!check.ok) throw std::invalid_argument("invalid plegma family: " + check.violation);
  FinVec out;
  out.scheme = x.scheme;
  for (const auto& [ix, c] : x.entries) {
    long long i = ix.v[0], n = ix.v[1];
    if (n > fam.k())
      throw std::invalid_argument("support position exceeds family width");
    out.entries.push_back({Index::inter(i, fam.rows[i - 1][n - 1]), c});
  }
  fv_normalize(out);
  return out;
}

std::vector<Index> natural_order(const IndexScheme& sch, std::vector<Index> ixs) {
  if (sch.kind != SchemeKind::interleaved)
    throw std::invalid_argument("natural_order is defined for interleaved indices");
  std::sort(ixs.begin(), ixs.end(), [&](const Index& a, const Index& b) {
    return index_cmp(sch, a, b) < 0;
  });
  return ixs;
}

Coloring builtin_coloring(const std::string& name) {
  if (name == "const")
    return {"const", [](const PlegmaFamily&) { return 0; }};
  if (name == "parity")
    return {"parity", [](const PlegmaFamily& f) {
              long long s = 0;
              for (const auto& r : f.rows)
                for (long long v : r) s += v;
              return static_cast<int>(s & 1);
            }};
  if (name == "gt10")
    return {"gt10", [](const PlegmaFamily& f) {
              for (const auto& r : f.rows)
                for (long long v : r)
                  if (v <= 10) return 0;
              return 1;
            }};
  throw std::invalid_argument("unknown coloring: " + name);
}

RamseyResult ramsey_search(const Coloring& col, const std::vector<long long>& ground,
                           int l, int k, int target_len, unsigned long long family_budget) {
  std::vector<long long> g = ground;
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  RamseyResult res;
  int n = static_cast<int>(g.size());
  if (target_len < 1 || target_len > n) return res;

  // colex walk over index combinations
  std::vector<int> c(target_len);
  for (int i = 0; i < target_len; ++i) c[i] = i;
  auto next_colex = [&]() -> bool {
    int i = 0;
    while (i + 1 < target_len && c[i] + 1 == c[i + 1]) {
      c[i] = i;
      ++i;
    }
    ++c[i];
    return c[target_len - 1] < n;
  };

  bool more = true;
  while (more) {
    ++res.subsets_checked;
    std::vector<long long> L(target_len);
    for (int i = 0; i < target_len; ++i) L[i] = g[c[i]];
    auto fams = plegma_enumerate(L, l, k, true);
    bool mono = true;
    int color = 0;
    for (size_t t = 0; t < fams.size(); ++t) {
      if (res.families_checked++ >= family_budget) {
        res.status = RamseyStatus::budget_exhausted;
        return res;
      }
      int cv = col.fn(fams[t]);
      if (t == 0) {
        color = cv;
      } else if (cv != color) {
        mono = false;
        break;
      }
    }
    if (mono && !fams.empty()) {
      res.status = RamseyStatus::found;
      res.subset = L;
      res.color = color;
      return res;
    }
    more = next_colex();
  }
  res.status = RamseyStatus::exhausted;
  return res;
}

} // namespace bsm
