#include "bsm/jtree.hpp"

#include <map>
#include <unordered_map>

namespace bsm {

namespace {

struct ChainDp {
  std::vector<std::string> nodes;                 // ancestor closure, depth-sorted
  std::unordered_map<std::string, int> id;
  std::vector<Rat> coeff;                         // 0 off support
  std::vector<Rat> root_sum;                      // coeff sum along root path, inclusive
  std::vector<std::vector<int>> children;
  std::vector<Rat> closed;                        // best over subtree, node free or chain closed inside
  std::vector<int> closed_via;                    // -1: children only; else t of the closing chain
  std::vector<std::map<int, Rat>> open;           // open[u][t]: rest of subtree with chain u..t pending

  Rat path_sum(int u, int t) const {
    Rat above = root_sum[u] - coeff[u];
    return root_sum[t] - above;
  }
};

void collect_witness(const ChainDp& dp, int u, const FinVec& x,
                     std::vector<std::pair<std::string, std::string>>& segs,
                     std::vector<Rat>& sums);

// Expands the subtree contribution given a pending chain u..t.
void collect_open(const ChainDp& dp, int u, int t,
                  const FinVec& x,
                  std::vector<std::pair<std::string, std::string>>& segs,
                  std::vector<Rat>& sums) {
  if (u == t) {
    for (int c : dp.children[u]) collect_witness(dp, c, x, segs, sums);
    return;
  }
  for (int c : dp.children[u]) {
    if (node_is_prefix(dp.nodes[c], dp.nodes[t]))
      collect_open(dp, c, t, x, segs, sums);
    else
      collect_witness(dp, c, x, segs, sums);
  }
}

void collect_witness(const ChainDp& dp, int u, const FinVec& x,
                     std::vector<std::pair<std::string, std::string>>& segs,
                     std::vector<Rat>& sums) {
  int via = dp.closed_via[u];
  if (via < 0) {
    for (int c : dp.children[u]) collect_witness(dp, c, x, segs, sums);
    return;
  }
  Rat s = dp.path_sum(u, via);
  if (s != 0) {
    // shrink to the minimal segment spanned by support nodes on the path
    std::string lo, hi;
    bool found = false;
    for (const auto& [ix, c] : x.entries) {
      (void)c;
      const std::string& nd = ix.node;
      if (node_is_prefix(dp.nodes[u], nd) && node_is_prefix(nd, dp.nodes[via])) {
        if (!found) {
          lo = hi = nd;
          found = true;
        } else {
          if (nd.size() < lo.size()) lo = nd;
          if (nd.size() > hi.size()) hi = nd;
        }
      }
    }
    segs.push_back({lo, hi});
    sums.push_back(s);
  }
  collect_open(dp, u, via, x, segs, sums);
}

ChainDp build_chain(const FinVec& x, std::vector<int>& order) {
  ChainDp dp;
  {
    std::map<std::string, Rat> closure;
    for (const auto& [ix, c] : x.entries) {
      std::string nd = ix.node;
      closure[nd] += c;
      while (!nd.empty()) {
        nd.pop_back();
        closure.emplace(nd, Rat(0));
      }
    }
    for (auto& [nd, c] : closure) {
      dp.id[nd] = static_cast<int>(dp.nodes.size());
      dp.nodes.push_back(nd);
      dp.coeff.push_back(c);
    }
  }
  int n = static_cast<int>(dp.nodes.size());
  dp.root_sum.assign(n, Rat(0));
  dp.children.assign(n, {});
  order.resize(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return dp.nodes[a].size() > dp.nodes[b].size();
  });
  for (int i = 0; i < n; ++i) {
    const std::string& nd = dp.nodes[i];
    if (!nd.empty()) {
      auto it = dp.id.find(nd.substr(0, nd.size() - 1));
      dp.children[it->second].push_back(i);
    }
  }
  {
    // root sums top-down (nodes map is sorted, parents precede children only
    // by prefix order, so compute by walking strings)
    for (int i = 0; i < n; ++i) {
      const std::string& nd = dp.nodes[i];
      Rat s = 0;
      for (size_t len = 0; len <= nd.size(); ++len) {
        auto it = dp.id.find(nd.substr(0, len));
        if (it != dp.id.end()) s += dp.coeff[it->second];
      }
      dp.root_sum[i] = s;
    }
  }
  return dp;
}

} // namespace

JtNorm jt_norm_sq(const FinVec& x) {
  if (x.scheme.kind != SchemeKind::dyadic)
    throw std::invalid_argument("jt_norm_sq needs a dyadic vector");
  JtNorm out;
  out.sq = 0;
  if (x.entries.empty()) return out;

  std::vector<int> order;
  ChainDp dp = build_chain(x, order);
  int n = static_cast<int>(dp.nodes.size());
  dp.closed.assign(n, Rat(0));
  dp.closed_via.assign(n, -1);
  dp.open.assign(n, {});
  for (int u : order) {
    Rat childsum = 0;
    for (int c : dp.children[u]) childsum += dp.closed[c];
    dp.open[u][u] = childsum;
    for (int c : dp.children[u]) {
      Rat others = childsum - dp.closed[c];
      for (const auto& [t, bv] : dp.open[c]) dp.open[u][t] = bv + others;
    }
    dp.closed[u] = childsum;
    dp.closed_via[u] = -1;
    for (const auto& [t, bv] : dp.open[u]) {
      Rat s = dp.path_sum(u, t);
      Rat cand = bv + s * s;
      if (cand > dp.closed[u]) {
        dp.closed[u] = cand;
        dp.closed_via[u] = t;
      }
    }
  }

  int root = dp.id.at("");
  out.sq = dp.closed[root];
  collect_witness(dp, root, x, out.segments, out.sums);
  return out;
}

JtThresholdFamily jt_threshold_family(const FinVec& x, const Rat& eps) {
  if (x.scheme.kind != SchemeKind::dyadic)
    throw std::invalid_argument("jt_threshold_family needs a dyadic vector");
  if (eps <= 0) throw std::invalid_argument("threshold must be positive");
  JtThresholdFamily out;
  if (x.entries.empty()) return out;
  Rat thr = eps * eps * jt_norm_sq(x).sq;
  if (thr == 0) return out;

  // Same chain DP, maximizing the count of segments that meet the threshold.
  // A chain below the threshold never helps (its candidate ties the
  // children-only value), so closed_via marks threshold segments only and the
  // shared witness collectors apply unchanged.
  std::vector<int> order;
  ChainDp dp = build_chain(x, order);
  int n = static_cast<int>(dp.nodes.size());
  dp.closed.assign(n, Rat(0));
  dp.closed_via.assign(n, -1);
  dp.open.assign(n, {});
  for (int u : order) {
    Rat childsum = 0;
    for (int c : dp.children[u]) childsum += dp.closed[c];
    dp.open[u][u] = childsum;
    for (int c : dp.children[u]) {
      Rat others = childsum - dp.closed[c];
      for (const auto& [t, bv] : dp.open[c]) dp.open[u][t] = bv + others;
    }
    dp.closed[u] = childsum;
    dp.closed_via[u] = -1;
    for (const auto& [t, bv] : dp.open[u]) {
      Rat s = dp.path_sum(u, t);
      if (s * s < thr) continue;
      Rat cand = bv + 1;
      if (cand > dp.closed[u]) {
        dp.closed[u] = cand;
        dp.closed_via[u] = t;
      }
    }
  }
  collect_witness(dp, dp.id.at(""), x, out.segments, out.sums);
  return out;
}

FinVec jt_band_project(const FinVec& x, int m, int n) {
  if (x.scheme.kind != SchemeKind::dyadic)
    throw std::invalid_argument("band projection needs a dyadic vector");
  if (m < 0 || n < m) throw std::invalid_argument("bad band range");
  FinVec out;
  out.scheme = x.scheme;
  for (const auto& ent : x.entries) {
    int d = static_cast<int>(ent.first.node.size());
    if (d >= m && d <= n) out.entries.push_back(ent);
  }
  return out;
}

} // namespace bsm
