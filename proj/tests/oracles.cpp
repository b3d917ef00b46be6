#include "oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace orc {

using bsm::Rat;

namespace {

// All intervals starting at or after `from`, each followed by the best
// continuation; plain exhaustive recursion.
Rat james_best(const std::vector<Rat>& c, size_t from) {
  Rat best = 0;
  for (size_t a = from; a < c.size(); ++a) {
    Rat sum = 0;
    for (size_t b = a; b < c.size(); ++b) {
      sum += c[b];
      Rat v = sum * sum + james_best(c, b + 1);
      if (v > best) best = v;
    }
  }
  return best;
}

} // namespace

Rat james_sq(const std::map<long long, Rat>& x) {
  if (x.empty()) return Rat(0);
  long long hi = x.rbegin()->first;
  if (hi > 12) throw std::invalid_argument("james oracle input too wide");
  std::vector<Rat> c(static_cast<size_t>(hi), Rat(0));
  for (const auto& [pos, coeff] : x) {
    if (pos < 1) throw std::invalid_argument("james oracle positions start at 1");
    c[static_cast<size_t>(pos - 1)] = coeff;
  }
  return james_best(c, 0);
}

namespace {

struct TreeUniverse {
  std::vector<std::string> nodes;           // all nodes up to the depth
  std::map<std::string, int> id;
  std::vector<Rat> coeff;
  // candidate segments: (node mask, coefficient sum), zero sums dropped
  std::vector<std::pair<std::uint32_t, Rat>> segs;
};

TreeUniverse build_universe(const std::map<std::string, Rat>& x, int depth) {
  if (depth > 4) throw std::invalid_argument("jt oracle depth capped at 4");
  TreeUniverse u;
  u.nodes.push_back("");
  for (size_t i = 0; i < u.nodes.size(); ++i) {
    if (static_cast<int>(u.nodes[i].size()) < depth) {
      u.nodes.push_back(u.nodes[i] + "0");
      u.nodes.push_back(u.nodes[i] + "1");
    }
  }
  std::sort(u.nodes.begin(), u.nodes.end());
  for (size_t i = 0; i < u.nodes.size(); ++i) u.id[u.nodes[i]] = static_cast<int>(i);
  u.coeff.assign(u.nodes.size(), Rat(0));
  for (const auto& [node, c] : x) {
    auto it = u.id.find(node);
    if (it == u.id.end()) throw std::invalid_argument("jt oracle node outside the depth");
    u.coeff[static_cast<size_t>(it->second)] = c;
  }
  // every (ancestor-or-self, descendant-or-self) pair is a segment
  for (const std::string& s : u.nodes)
    for (const std::string& t : u.nodes) {
      if (t.size() < s.size() || t.compare(0, s.size(), s) != 0) continue;
      std::uint32_t mask = 0;
      Rat sum = 0;
      for (size_t len = s.size(); len <= t.size(); ++len) {
        int nid = u.id.at(t.substr(0, len));
        mask |= (1u << nid);
        sum += u.coeff[static_cast<size_t>(nid)];
      }
      u.segs.push_back({mask, sum});
    }
  return u;
}

// Exhaustive take/skip over the segment list, memoized on (index, used nodes).
template <typename Score>
auto seg_opt(const TreeUniverse& u, const Score& score) {
  using R = decltype(score(Rat(0)));
  std::map<std::pair<size_t, std::uint32_t>, R> memo;
  auto rec = [&](auto&& self, size_t i, std::uint32_t used) -> R {
    if (i == u.segs.size()) return R{};
    auto key = std::make_pair(i, used);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    R best = self(self, i + 1, used);
    const auto& [mask, sum] = u.segs[i];
    if ((mask & used) == 0) {
      R take = score(sum);
      if (take >= R{}) {
        R v = take + self(self, i + 1, used | mask);
        if (v > best) best = v;
      }
    }
    memo[key] = best;
    return best;
  };
  return rec(rec, 0, 0);
}

} // namespace

Rat jt_sq(const std::map<std::string, Rat>& x, int depth) {
  TreeUniverse u = build_universe(x, depth);
  // dropping zero-sum segments changes no family value
  std::erase_if(u.segs, [](const auto& s) { return s.second == 0; });
  return seg_opt(u, [](const Rat& s) -> Rat { return s * s; });
}

int jt_threshold_count(const std::map<std::string, Rat>& x, int depth, const Rat& thr) {
  TreeUniverse u = build_universe(x, depth);
  std::erase_if(u.segs, [&](const auto& s) { return s.second * s.second < thr; });
  return seg_opt(u, [&](const Rat&) -> int { return 1; });
}

namespace {

void k_subsets(const std::vector<long long>& ground, int k,
               std::vector<std::vector<long long>>& out) {
  std::vector<int> pick(static_cast<size_t>(k));
  auto rec = [&](auto&& self, int from, int depth) -> void {
    if (depth == k) {
      std::vector<long long> row;
      for (int i : pick) row.push_back(ground[static_cast<size_t>(i)]);
      out.push_back(std::move(row));
      return;
    }
    for (int i = from; i < static_cast<int>(ground.size()); ++i) {
      pick[static_cast<size_t>(depth)] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
}

} // namespace

long long plegma_count(const std::vector<long long>& ground, int l, int k, bool strict) {
  std::vector<std::vector<long long>> rows;
  k_subsets(ground, k, rows);
  std::vector<size_t> choice(static_cast<size_t>(l), 0);
  long long count = 0;
  auto rec = [&](auto&& self, int row) -> void {
    if (row == l) {
      for (int j = 0; j + 1 < k; ++j) {
        long long colmax = rows[choice[0]][static_cast<size_t>(j)];
        long long nextmin = rows[choice[0]][static_cast<size_t>(j + 1)];
        for (int i = 1; i < l; ++i) {
          colmax = std::max(colmax, rows[choice[static_cast<size_t>(i)]][static_cast<size_t>(j)]);
          nextmin =
              std::min(nextmin, rows[choice[static_cast<size_t>(i)]][static_cast<size_t>(j + 1)]);
        }
        if (colmax >= nextmin) return;
      }
      for (int j = 0; j < k; ++j)
        for (int i = 0; i + 1 < l; ++i) {
          long long a = rows[choice[static_cast<size_t>(i)]][static_cast<size_t>(j)];
          long long b = rows[choice[static_cast<size_t>(i + 1)]][static_cast<size_t>(j)];
          if (strict ? a >= b : a > b) return;
        }
      ++count;
      return;
    }
    for (size_t c = 0; c < rows.size(); ++c) {
      choice[static_cast<size_t>(row)] = c;
      self(self, row + 1);
    }
  };
  rec(rec, 0);
  return count;
}

Rat mr_small(const std::map<long long, Rat>& global_coeffs) {
  Rat sup = 0, line1 = 0, line2 = 0;
  for (const auto& [g, c] : global_coeffs) {
    if (g < 1 || g > 511) throw std::invalid_argument("mr oracle needs support within 1..511");
    Rat a = bsm::rat_abs(c);
    if (a > sup) sup = a;
    (g % 2 == 1 ? line1 : line2) += a;
  }
  Rat avg = std::max(line1, line2) / 16;
  return std::max(sup, avg);
}

} // namespace orc
