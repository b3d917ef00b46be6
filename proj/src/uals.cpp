#include "bsm/uals.hpp"

#include "bsm/calx.hpp"
#include "bsm/lp.hpp"
#include "bsm/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bsm {

namespace {

struct index_less {
  IndexScheme sch;
  bool operator()(const Index& a, const Index& b) const { return index_cmp(sch, a, b) < 0; }
};

using coeff_map = std::map<Index, Rat, index_less>;

FinVec map_to_vec(const IndexScheme& sch, const coeff_map& m) {
  FinVec out;
  out.scheme = sch;
  for (const auto& [ix, c] : m)
    if (c != 0) out.entries.push_back({ix, c});
  return out;
}

FinVec nat_unit(long long i) {
  FinVec v;
  v.scheme.kind = SchemeKind::natural;
  v.entries.push_back({Index::nat(i), Rat(1)});
  return v;
}

FinVec slot_unit(int n, long long j) {
  FinVec v;
  v.scheme.kind = SchemeKind::mixed_sum;
  v.entries.push_back({Index::mixed(n, 0, j, 1), Rat(1)});
  return v;
}

std::string f50_str(const F50& x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(12) << x;
  return os.str();
}

// Dense rational expansion of A w and every hull image over the per-witness
// union support, in canonical coordinate order.
struct dense_wit {
  std::vector<Index> coords;
  std::vector<std::vector<Rat>> g; // g[0] target, g[1..N] hull images
};

std::vector<dense_wit> densify(const OperatorModel& A, const std::vector<OperatorModel>& hull,
                               const std::vector<FinVec>& wits) {
  std::vector<dense_wit> out;
  for (const auto& w : wits) {
    std::vector<FinVec> imgs;
    imgs.push_back(A.apply(w));
    for (const auto& B : hull) imgs.push_back(B.apply(w));
    std::map<Index, int, index_less> at{index_less{A.codomain}};
    for (const auto& v : imgs)
      for (const auto& [ix, c] : v.entries) at.emplace(ix, 0);
    dense_wit dw;
    int k = 0;
    for (auto& [ix, pos] : at) {
      pos = k++;
      dw.coords.push_back(ix);
    }
    dw.g.assign(imgs.size(), std::vector<Rat>(k, Rat(0)));
    for (size_t i = 0; i < imgs.size(); ++i)
      for (const auto& [ix, c] : imgs[i].entries) dw.g[i][at[ix]] = c;
    out.push_back(std::move(dw));
  }
  return out;
}

// Exact LP for polyhedral codomain norms: minimize v subject to
// ||g_{w,0} - sum_i lambda_i g_{w,i}|| <= v per witness, lambda in the
// simplex. ell1 introduces one absolute-value variable per coordinate.
SimplexGap minimax_poly_lp(const std::vector<dense_wit>& dws, int N, GapNorm nt) {
  int W = static_cast<int>(dws.size());
  std::vector<int> ustart(W, -1);
  int nu = 0;
  if (nt == GapNorm::ell1)
    for (int w = 0; w < W; ++w) {
      ustart[w] = nu;
      nu += static_cast<int>(dws[w].coords.size());
    }
  int vcol = N + nu;
  int nslack = 0;
  for (const auto& dw : dws) nslack += 2 * static_cast<int>(dw.coords.size());
  if (nt == GapNorm::ell1) nslack += W;
  int ncols = vcol + 1 + nslack;

  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> b;
  auto new_row = [&]() -> std::vector<Rat>& {
    rows.emplace_back(ncols, Rat(0));
    b.emplace_back(0);
    return rows.back();
  };
  {
    auto& r = new_row();
    for (int i = 0; i < N; ++i) r[i] = 1;
    b.back() = 1;
  }
  int slack = vcol + 1;
  for (int w = 0; w < W; ++w) {
    const auto& dw = dws[w];
    int C = static_cast<int>(dw.coords.size());
    for (int c = 0; c < C; ++c)
      for (int sg : {1, -1}) {
        auto& r = new_row();
        for (int i = 0; i < N; ++i) r[i] = Rat(-sg) * dw.g[i + 1][c];
        r[nt == GapNorm::ell1 ? N + ustart[w] + c : vcol] = -1;
        r[slack++] = 1;
        b.back() = Rat(-sg) * dw.g[0][c];
      }
    if (nt == GapNorm::ell1) {
      auto& r = new_row();
      for (int c = 0; c < C; ++c) r[N + ustart[w] + c] = 1;
      r[vcol] = -1;
      r[slack++] = 1;
    }
  }
  std::vector<Rat> obj(ncols, Rat(0));
  obj[vcol] = 1;
  LpResult res = lp_solve_eq(rows, b, obj);
  if (res.status != LpStatus::optimal) throw std::logic_error("gap lp did not reach an optimum");
  SimplexGap out;
  out.value = res.objective;
  out.lambda.assign(res.x.begin(), res.x.begin() + N);
  return out;
}

// Slot-structured norms reduce to weighted |t - M lambda| rows when, per
// populated slot, all images are scalar multiples of one direction with a
// rational slot norm; slot_pq additionally needs a single populated slot per
// witness, since an l_q join of several rows is not a max.
struct linear_rows {
  bool ok = false;
  std::vector<std::vector<Rat>> M;
  std::vector<Rat> t, w;
};

linear_rows reduce_slot_rows(const std::vector<dense_wit>& dws, int N, GapNorm nt, const Rat& p) {
  linear_rows out;
  for (const auto& dw : dws) {
    std::map<std::array<long long, 3>, std::vector<int>> slots;
    for (size_t c = 0; c < dw.coords.size(); ++c) {
      const Index& ix = dw.coords[c];
      slots[{ix.v[0], ix.v[1], ix.v[2]}].push_back(static_cast<int>(c));
    }
    int populated = 0;
    for (const auto& [key, pos] : slots) {
      int piv_img = -1, piv_pos = -1;
      for (int i = 0; i <= N && piv_img < 0; ++i)
        for (int c : pos)
          if (dw.g[i][c] != 0) {
            piv_img = i;
            piv_pos = c;
            break;
          }
      if (piv_img < 0) continue;
      ++populated;
      const Rat& piv = dw.g[piv_img][piv_pos];
      std::vector<Rat> ratio(N + 1);
      for (int i = 0; i <= N; ++i) {
        ratio[i] = dw.g[i][piv_pos] / piv;
        for (int c : pos)
          if (dw.g[i][c] != ratio[i] * dw.g[piv_img][c]) return {};
      }
      Rat wgt;
      if (pos.size() == 1) {
        wgt = rat_abs(dw.g[piv_img][pos[0]]);
      } else if (nt == GapNorm::slot_max || p == 2) {
        Rat sq = 0;
        for (int c : pos) sq += dw.g[piv_img][c] * dw.g[piv_img][c];
        try {
          wgt = slot_norm_exact(sq);
        } catch (const std::domain_error&) {
          return {};
        }
      } else if (p == 1) {
        wgt = 0;
        for (int c : pos) wgt += rat_abs(dw.g[piv_img][c]);
      } else {
        return {};
      }
      std::vector<Rat> row(N);
      for (int i = 1; i <= N; ++i) row[i - 1] = ratio[i];
      out.M.push_back(std::move(row));
      out.t.push_back(ratio[0]);
      out.w.push_back(wgt);
    }
    if (nt == GapNorm::slot_pq && populated > 1) return {};
  }
  out.ok = true;
  return out;
}

// Projected-subgradient fallback for slot norms without the parallel
// structure. Doubles suffice: the certified tolerances are 1e-9.
struct descent_problem {
  GapNorm nt = GapNorm::ell1;
  double p = 2, q = 2;
  int N = 0;
  struct wit {
    std::vector<std::vector<double>> g;
    std::vector<int> slot;
    int nslots = 0;
  };
  std::vector<wit> wits;

  double eval(const std::vector<double>& lam, std::vector<double>* grad) const;
};

double descent_problem::eval(const std::vector<double>& lam, std::vector<double>* grad) const {
  double best = -1;
  int bw = -1;
  std::vector<double> bestv;
  for (size_t w = 0; w < wits.size(); ++w) {
    const auto& W = wits[w];
    int C = static_cast<int>(W.g[0].size());
    std::vector<double> v(C);
    for (int c = 0; c < C; ++c) {
      double s = W.g[0][c];
      for (int i = 0; i < N; ++i) s -= lam[i] * W.g[i + 1][c];
      v[c] = s;
    }
    double val = 0;
    switch (nt) {
      case GapNorm::ell1:
        for (double x : v) val += std::fabs(x);
        break;
      case GapNorm::sup:
        for (double x : v) val = std::max(val, std::fabs(x));
        break;
      case GapNorm::slot_max: {
        std::vector<double> sq(W.nslots, 0.0);
        for (int c = 0; c < C; ++c) sq[W.slot[c]] += v[c] * v[c];
        double m = 0;
        for (double s : sq) m = std::max(m, s);
        val = std::sqrt(m);
        break;
      }
      case GapNorm::slot_pq: {
        std::vector<double> mass(W.nslots, 0.0);
        for (int c = 0; c < C; ++c) mass[W.slot[c]] += std::pow(std::fabs(v[c]), p);
        double acc = 0;
        for (double s : mass) acc += std::pow(s, q / p);
        val = std::pow(acc, 1.0 / q);
        break;
      }
    }
    if (val > best) {
      best = val;
      bw = static_cast<int>(w);
      bestv = std::move(v);
    }
  }
  if (grad) {
    grad->assign(N, 0.0);
    const auto& W = wits[bw];
    int C = static_cast<int>(bestv.size());
    std::vector<double> s(C, 0.0);
    switch (nt) {
      case GapNorm::ell1:
        for (int c = 0; c < C; ++c) s[c] = bestv[c] > 0 ? 1.0 : (bestv[c] < 0 ? -1.0 : 0.0);
        break;
      case GapNorm::sup: {
        int am = 0;
        for (int c = 1; c < C; ++c)
          if (std::fabs(bestv[c]) > std::fabs(bestv[am])) am = c;
        if (C > 0) s[am] = bestv[am] > 0 ? 1.0 : (bestv[am] < 0 ? -1.0 : 0.0);
        break;
      }
      case GapNorm::slot_max: {
        std::vector<double> sq(W.nslots, 0.0);
        for (int c = 0; c < C; ++c) sq[W.slot[c]] += bestv[c] * bestv[c];
        int am = 0;
        for (int t = 1; t < W.nslots; ++t)
          if (sq[t] > sq[am]) am = t;
        if (best > 0)
          for (int c = 0; c < C; ++c)
            if (W.slot[c] == am) s[c] = bestv[c] / best;
        break;
      }
      case GapNorm::slot_pq: {
        std::vector<double> mass(W.nslots, 0.0);
        for (int c = 0; c < C; ++c) mass[W.slot[c]] += std::pow(std::fabs(bestv[c]), p);
        if (best > 0)
          for (int c = 0; c < C; ++c) {
            double a = std::fabs(bestv[c]);
            if (a == 0 || mass[W.slot[c]] == 0) continue;
            double ns = std::pow(mass[W.slot[c]], 1.0 / p);
            s[c] = std::pow(best, 1.0 - q) * std::pow(ns, q - p) * std::pow(a, p - 1.0) *
                   (bestv[c] > 0 ? 1.0 : -1.0);
          }
        break;
      }
    }
    for (int i = 0; i < N; ++i) {
      double d = 0;
      for (int c = 0; c < C; ++c) d += s[c] * W.g[i + 1][c];
      (*grad)[i] = -d;
    }
  }
  return best;
}

void project_simplex(std::vector<double>& y) {
  std::vector<double> u(y);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0, tau = 0;
  for (size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0) tau = t;
  }
  for (auto& x : y) x = std::max(0.0, x - tau);
}

descent_problem build_descent(const std::vector<dense_wit>& dws, int N, GapNorm nt, const Rat& p,
                              const Rat& q) {
  descent_problem P;
  P.nt = nt;
  P.p = static_cast<double>(to_f50(p));
  P.q = static_cast<double>(to_f50(q));
  P.N = N;
  for (const auto& dw : dws) {
    descent_problem::wit W;
    W.g.assign(dw.g.size(), {});
    for (size_t i = 0; i < dw.g.size(); ++i) {
      W.g[i].reserve(dw.g[i].size());
      for (const auto& r : dw.g[i]) W.g[i].push_back(static_cast<double>(to_f50(r)));
    }
    std::map<std::array<long long, 3>, int> ids;
    for (const auto& ix : dw.coords) {
      auto [it, fresh] = ids.emplace(std::array<long long, 3>{ix.v[0], ix.v[1], ix.v[2]},
                                     static_cast<int>(ids.size()));
      W.slot.push_back(it->second);
    }
    W.nslots = static_cast<int>(ids.size());
    P.wits.push_back(std::move(W));
  }
  return P;
}

struct descent_out {
  double best = 0;
  std::vector<double> lambda;
  std::vector<double> restart_values;
};

descent_out run_descent(const descent_problem& P, unsigned long long seed, int restarts = 20) {
  Rng rng(seed);
  descent_out out;
  bool first = true;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> lam(P.N, 1.0 / P.N);
    if (r > 0) {
      double s = 0;
      for (auto& x : lam) {
        x = static_cast<double>(rng.uniform(1, 1000));
        s += x;
      }
      for (auto& x : lam) x /= s;
    }
    std::vector<double> grad;
    double fbest = P.eval(lam, nullptr);
    std::vector<double> lbest = lam;
    double delta = 0.1 * (fbest + 1.0);
    double window = fbest;
    int since = 0;
    for (int t = 0; t < 20000; ++t) {
      double f = P.eval(lam, &grad);
      if (f < fbest) {
        fbest = f;
        lbest = lam;
      }
      double gn = 0;
      for (double g : grad) gn += g * g;
      if (gn < 1e-30) break;
      double step = (f - (fbest - delta)) / gn;
      for (int i = 0; i < P.N; ++i) lam[i] -= step * grad[i];
      project_simplex(lam);
      if (++since >= 250) {
        if (window - fbest < 1e-12 * std::max(1.0, fbest)) {
          delta *= 0.5;
          if (delta < 1e-14) break;
        }
        window = fbest;
        since = 0;
      }
    }
    out.restart_values.push_back(fbest);
    if (first || fbest < out.best) {
      out.best = fbest;
      out.lambda = lbest;
      first = false;
    }
  }
  return out;
}

GapValue solve_gap(const OperatorModel& A, const std::vector<OperatorModel>& hull,
                   const std::vector<FinVec>& wits, GapNorm nt, const Rat& p, const Rat& q,
                   unsigned long long seed) {
  if (hull.empty()) throw std::invalid_argument("empty hull");
  if (wits.empty()) throw std::invalid_argument("empty witness set");
  int N = static_cast<int>(hull.size());
  auto dws = densify(A, hull, wits);
  GapValue out;
  auto finish_exact = [&](const Rat& value, std::vector<Rat> lambda) {
    out.exact = true;
    out.value = value;
    out.value_f = to_f50(value);
    out.lambda = std::move(lambda);
    out.lambda_d.clear();
    for (const auto& l : out.lambda) out.lambda_d.push_back(static_cast<double>(to_f50(l)));
  };
  if (nt == GapNorm::ell1 || nt == GapNorm::sup) {
    SimplexGap sg = minimax_poly_lp(dws, N, nt);
    finish_exact(sg.value, std::move(sg.lambda));
    return out;
  }
  linear_rows lr = reduce_slot_rows(dws, N, nt, p);
  if (lr.ok) {
    if (lr.M.empty()) {
      finish_exact(Rat(0), std::vector<Rat>(N, Rat(1, N)));
    } else {
      SimplexGap sg = min_weighted_linf_over_simplex(lr.M, lr.t, lr.w);
      finish_exact(sg.value, std::move(sg.lambda));
    }
    return out;
  }
  descent_problem P = build_descent(dws, N, nt, p, q);
  descent_out d = run_descent(P, seed);
  out.exact = false;
  out.value_f = F50(d.best);
  out.lambda_d = d.lambda;
  return out;
}

} // namespace

FinVec OperatorModel::apply(const FinVec& x) const {
  if (x.scheme != domain) throw std::invalid_argument("operator domain scheme mismatch");
  coeff_map acc{index_less{codomain}};
  for (const auto& [ix, c] : x.entries) {
    auto it = std::lower_bound(
        basis.begin(), basis.end(), ix,
        [&](const Index& a, const Index& b) { return index_cmp(domain, a, b) < 0; });
    if (it == basis.end() || index_cmp(domain, *it, ix) != 0)
      throw std::invalid_argument("coordinate outside the operator truncation");
    const FinVec& col = columns[it - basis.begin()];
    for (const auto& [jx, d] : col.entries) acc[jx] += c * d;
  }
  return map_to_vec(codomain, acc);
}

OperatorModel op_fold_sum(long long m) {
  if (m < 1) throw std::invalid_argument("truncation must be positive");
  OperatorModel op;
  op.name = "fold_sum[1.." + std::to_string(2 * m) + "]";
  op.domain.kind = SchemeKind::natural;
  op.codomain.kind = SchemeKind::natural;
  for (long long i = 1; i <= 2 * m; ++i) {
    op.basis.push_back(Index::nat(i));
    FinVec col;
    col.scheme = op.codomain;
    col.entries.push_back({Index::nat(i % 2 == 1 ? 1 : 2), Rat(1)});
    op.columns.push_back(std::move(col));
  }
  return op;
}

OperatorModel op_fold_rank(const Rat& z1, const Rat& z2, bool plus, long long m) {
  if (m < 1) throw std::invalid_argument("truncation must be positive");
  OperatorModel op;
  op.name = std::string(plus ? "rank_plus(" : "rank_minus(") + rat_str(z1) + "," + rat_str(z2) + ")";
  op.domain.kind = SchemeKind::natural;
  op.codomain.kind = SchemeKind::natural;
  for (long long i = 1; i <= 2 * m; ++i) {
    Rat s = (plus || i % 2 == 1) ? Rat(1) : Rat(-1);
    op.basis.push_back(Index::nat(i));
    FinVec col;
    col.scheme = op.codomain;
    if (z1 != 0) col.entries.push_back({Index::nat(1), s * z1});
    if (z2 != 0) col.entries.push_back({Index::nat(2), s * z2});
    op.columns.push_back(std::move(col));
  }
  return op;
}

OperatorModel op_slot_selector(int n, const std::vector<int>& G, int inner) {
  if (n < 1) throw std::invalid_argument("block must be >= 1");
  if (inner < 1) throw std::invalid_argument("inner truncation must be >= 1");
  std::set<int> gs(G.begin(), G.end());
  if (gs.size() != G.size()) throw std::invalid_argument("selector slots repeat");
  for (int j : G)
    if (j < 1 || j > 2 * n) throw std::invalid_argument("selector slot out of range");
  OperatorModel op;
  std::ostringstream nm;
  nm << "select{";
  for (size_t i = 0; i < G.size(); ++i) nm << (i ? "," : "") << G[i];
  nm << "}@" << n;
  op.name = nm.str();
  op.domain.kind = SchemeKind::mixed_sum;
  op.codomain.kind = SchemeKind::mixed_sum;
  for (long long j = 1; j <= 2 * n; ++j)
    for (long long mm = 1; mm <= inner; ++mm) {
      op.basis.push_back(Index::mixed(n, 0, j, mm));
      FinVec col;
      col.scheme = op.codomain;
      if (gs.count(static_cast<int>(j)))
        col.entries.push_back({Index::mixed(n, 1, j, mm), Rat(1)});
      op.columns.push_back(std::move(col));
    }
  return op;
}

OperatorModel op_rank_one(const Rat& xs1, const Rat& xs2, const Rat& x1, const Rat& x2) {
  OperatorModel op;
  op.name = "rank1((" + rat_str(xs1) + "," + rat_str(xs2) + ")x(" + rat_str(x1) + "," +
            rat_str(x2) + "))";
  op.domain.kind = SchemeKind::natural;
  op.codomain.kind = SchemeKind::natural;
  for (int c = 1; c <= 2; ++c) {
    const Rat& xs = c == 1 ? xs1 : xs2;
    op.basis.push_back(Index::nat(c));
    FinVec col;
    col.scheme = op.codomain;
    if (xs * x1 != 0) col.entries.push_back({Index::nat(1), xs * x1});
    if (xs * x2 != 0) col.entries.push_back({Index::nat(2), xs * x2});
    op.columns.push_back(std::move(col));
  }
  return op;
}

OperatorModel op_identity2() {
  OperatorModel op;
  op.name = "identity2";
  op.domain.kind = SchemeKind::natural;
  op.codomain.kind = SchemeKind::natural;
  for (int c = 1; c <= 2; ++c) {
    op.basis.push_back(Index::nat(c));
    FinVec col;
    col.scheme = op.codomain;
    col.entries.push_back({Index::nat(c), Rat(1)});
    op.columns.push_back(std::move(col));
  }
  return op;
}

std::vector<std::vector<int>> subsets_of_size(int total, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > total) return out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i + 1;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == total - (k - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

FinVec combo_apply(const ConvexCombination& c, const FinVec& x) {
  if (c.points.empty() || c.points.size() != c.weights.size())
    throw std::invalid_argument("combination shape mismatch");
  Rat total = 0;
  for (const auto& w : c.weights) {
    if (w < 0) throw std::invalid_argument("negative combination weight");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("combination weights must sum to 1");
  FinVec acc;
  acc.scheme = c.points[0].codomain;
  for (size_t i = 0; i < c.points.size(); ++i)
    acc = fv_add(acc, fv_scale(c.points[i].apply(x), c.weights[i]));
  return acc;
}

GapValue pointwise_gap(const OperatorModel& A, const std::vector<OperatorModel>& hull,
                       const FinVec& x, GapNorm norm, const Rat& p, const Rat& q,
                       unsigned long long seed) {
  return solve_gap(A, hull, {x}, norm, p, q, seed);
}

GapValue minimax_gap(const OperatorModel& A, const std::vector<OperatorModel>& hull,
                     const std::vector<FinVec>& witnesses, GapNorm norm, const Rat& p,
                     const Rat& q, unsigned long long seed) {
  return solve_gap(A, hull, witnesses, norm, p, q, seed);
}

PigeonholeWitness pigeonhole_witness(const std::vector<std::vector<int>>& G,
                                     const std::vector<Rat>& lambda, int n) {
  if (G.empty() || G.size() != lambda.size())
    throw std::invalid_argument("combination shape mismatch");
  Rat total = 0;
  for (const auto& l : lambda) {
    if (l < 0) throw std::invalid_argument("negative combination weight");
    total += l;
  }
  if (total != 1) throw std::invalid_argument("combination weights must sum to 1");
  std::vector<Rat> cov(2 * n + 1, Rat(0));
  for (size_t i = 0; i < G.size(); ++i) {
    if (static_cast<int>(G[i].size()) != n)
      throw std::invalid_argument("selector is not half-size");
    std::set<int> seen;
    for (int j : G[i]) {
      if (j < 1 || j > 2 * n || !seen.insert(j).second)
        throw std::invalid_argument("malformed selector slot");
      cov[j] += lambda[i];
    }
  }
  Rat sum = 0;
  for (int j = 1; j <= 2 * n; ++j) sum += cov[j];
  if (sum != n) throw std::logic_error("coverage identity violated");
  for (int j = 1; j <= 2 * n; ++j)
    if (cov[j] <= Rat(1, 2)) return {j, cov[j]};
  throw std::logic_error("pigeonhole slot missing");
}

namespace {

GapReport case_ell1(const CaseParams& prm) {
  long long m = prm.n;
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("half-width must be even and >= 2");
  if (2 * m > 2000) throw std::invalid_argument("budget exceeded: truncation above 2000 coordinates");
  if (prm.probes < 0 || prm.probes > 5000) throw std::invalid_argument("budget exceeded: probes");

  GapReport rep;
  rep.case_name = "ell1";
  rep.n = m;
  rep.probes = prm.probes;
  rep.seed = prm.seed;
  Rng rng(prm.seed);
  OperatorModel A = op_fold_sum(m);

  // Constructive selector: z is the normalized image, rank type is whichever
  // of |a1+a2|, |a1-a2| realizes |a1|+|a2|; then B z-reproduces A(x).
  auto selector_gap = [&](const FinVec& x) {
    Rat a1 = 0, a2 = 0;
    for (const auto& [ix, c] : x.entries) (ix.v[0] % 2 == 1 ? a1 : a2) += c;
    bool plus = rat_abs(a1 + a2) >= rat_abs(a1 - a2);
    Rat den = plus ? Rat(a1 + a2) : Rat(a1 - a2);
    Rat z1 = 0, z2 = 0;
    if (den != 0) {
      z1 = a1 / den;
      z2 = a2 / den;
    }
    OperatorModel B = op_fold_rank(z1, z2, plus, m);
    return fv_lp_sum(fv_axpy(Rat(-1), B.apply(x), A.apply(x)), 1);
  };
  auto record = [&](const std::string& label, const Rat& g) {
    rep.pointwise.push_back({label, rat_str(g)});
    if (g > rep.pointwise_worst) rep.pointwise_worst = g;
  };
  for (long long i = 1; i <= 2 * m; ++i) record("e" + std::to_string(i), selector_gap(nat_unit(i)));
  for (int t = 0; t < prm.probes; ++t) {
    coeff_map mp{index_less{IndexScheme{SchemeKind::natural}}};
    int nnz = static_cast<int>(rng.uniform(1, 6));
    for (int s = 0; s < nnz; ++s) {
      long long pos = rng.uniform(1, 2 * m);
      long long num = rng.uniform(-9, 9);
      if (num == 0) num = 1;
      mp[Index::nat(pos)] += Rat(num, rng.uniform(1, 4));
    }
    Rat total = 0;
    for (const auto& [ix, c] : mp) total += rat_abs(c);
    if (total == 0) {
      mp[Index::nat(1)] = 1;
      total = 1;
    }
    FinVec x = map_to_vec(IndexScheme{SchemeKind::natural}, mp);
    x = fv_scale(x, 1 / total);
    record("r" + std::to_string(t), selector_gap(x));
  }
  rep.pointwise_worst_f = to_f50(rep.pointwise_worst);
  rep.pointwise_bound = "0";
  rep.pointwise_pass = rep.pointwise_worst == 0;

  long long k = m / 2;
  FinVec wplus = fv_scale(fv_add(nat_unit(2 * k - 1), nat_unit(2 * k)), Rat(1, 2));
  FinVec wminus = fv_scale(fv_axpy(Rat(-1), nat_unit(2 * k), nat_unit(2 * k - 1)), Rat(1, 2));
  rep.witnesses = {"(e" + std::to_string(2 * k - 1) + "+e" + std::to_string(2 * k) + ")/2",
                   "(e" + std::to_string(2 * k - 1) + "-e" + std::to_string(2 * k) + ")/2"};

  std::vector<OperatorModel> pool;
  bool first = true;
  for (int s = 0; s < 100; ++s) {
    int terms = static_cast<int>(rng.uniform(1, 5));
    ConvexCombination combo;
    for (int i = 0; i < terms; ++i) {
      Rat z1 = rng.rational(5, 3), z2 = rng.rational(5, 3);
      Rat tot = rat_abs(z1) + rat_abs(z2);
      if (tot == 0) {
        z1 = 1;
        tot = 1;
      }
      combo.points.push_back(op_fold_rank(z1 / tot, z2 / tot, rng.uniform(0, 1) == 1, m));
    }
    combo.weights = rng.simplex_point(terms);
    Rat g1 = fv_lp_sum(fv_axpy(Rat(-1), combo_apply(combo, wplus), A.apply(wplus)), 1);
    Rat g2 = fv_lp_sum(fv_axpy(Rat(-1), combo_apply(combo, wminus), A.apply(wminus)), 1);
    Rat mx = std::max(g1, g2);
    if (first || mx < rep.sampled_min) {
      rep.sampled_min = mx;
      first = false;
    }
    if (s < 50)
      for (const auto& pt : combo.points) pool.push_back(pt);
  }
  rep.sampled_min_f = to_f50(rep.sampled_min);

  GapValue mm = minimax_gap(A, pool, {wplus, wminus}, GapNorm::ell1);
  rep.minimax_exact = mm.exact;
  rep.minimax_lower = mm.value;
  rep.minimax_lower_f = mm.value_f;
  rep.lambda = mm.lambda;
  rep.minimax_bound = "1/2";
  rep.minimax_pass = mm.value >= Rat(1, 2) && rep.sampled_min >= Rat(1, 2);

  ConvexCombination star{pool, mm.lambda};
  Rat u1 = fv_lp_sum(
      fv_axpy(Rat(-1), combo_apply(star, nat_unit(2 * k - 1)), A.apply(nat_unit(2 * k - 1))), 1);
  Rat u2 =
      fv_lp_sum(fv_axpy(Rat(-1), combo_apply(star, nat_unit(2 * k)), A.apply(nat_unit(2 * k))), 1);
  rep.upper = std::max(u1, u2);
  rep.upper_f = to_f50(rep.upper);
  rep.notes.push_back("upper is the restricted norm on the witness span at the minimizing mix");
  rep.pass = rep.pointwise_pass && rep.minimax_pass;
  return rep;
}

GapReport case_calx(const CaseParams& prm) {
  int n = static_cast<int>(prm.n);
  if (n < 1 || n > 6) throw std::invalid_argument("budget exceeded: block must be in 1..6");
  if (prm.probes < 0 || prm.probes > 5000) throw std::invalid_argument("budget exceeded: probes");
  const int inner = 3;

  GapReport rep;
  rep.case_name = "calx";
  rep.n = n;
  rep.probes = prm.probes;
  rep.seed = prm.seed;
  Rng rng(prm.seed);

  std::vector<int> all(2 * n);
  for (int j = 0; j < 2 * n; ++j) all[j] = j + 1;
  OperatorModel A = op_slot_selector(n, all, inner);
  auto Gs = subsets_of_size(2 * n, n);
  std::vector<OperatorModel> hull;
  hull.reserve(Gs.size());
  for (const auto& G : Gs) hull.push_back(op_slot_selector(n, G, inner));

  // Per probe: rational slot norms, greedy keeps the n heaviest slots, the
  // leftover max slot norm is the gap; cross-checked against the block-norm
  // oracle on the actual image difference.
  auto greedy_gap = [&](const FinVec& x) {
    std::map<long long, Rat> slot_sq;
    for (const auto& [ix, c] : x.entries) slot_sq[ix.v[2]] += c * c;
    std::vector<std::pair<Rat, long long>> order;
    for (long long j = 1; j <= 2 * n; ++j) {
      auto it = slot_sq.find(j);
      order.push_back({it == slot_sq.end() ? Rat(0) : slot_norm_exact(it->second), j});
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<int> G;
    Rat gap = 0;
    for (int r = 0; r < 2 * n; ++r) {
      if (r < n)
        G.push_back(static_cast<int>(order[r].second));
      else
        gap = std::max(gap, order[r].first);
    }
    std::sort(G.begin(), G.end());
    FinVec diff = fv_axpy(Rat(-1), op_slot_selector(n, G, inner).apply(x), A.apply(x));
    if (calx_norm_sq(diff).value != RadicalSum::of_rat(gap * gap))
      throw std::logic_error("greedy gap disagrees with the block-norm oracle");
    return gap;
  };
  auto record = [&](const std::string& label, const Rat& g) {
    rep.pointwise.push_back({label, rat_str(g)});
    if (g > rep.pointwise_worst) rep.pointwise_worst = g;
  };
  for (long long j = 1; j <= 2 * n; ++j) record("slot" + std::to_string(j), greedy_gap(slot_unit(n, j)));
  for (int t = 0; t < prm.probes; ++t) {
    coeff_map mp{index_less{IndexScheme{SchemeKind::mixed_sum}}};
    for (long long j = 1; j <= 2 * n; ++j) {
      long long kind = rng.uniform(0, 3);
      if (kind == 0) continue;
      if (kind <= 2) {
        long long mmix = rng.uniform(1, inner);
        long long c = rng.uniform(-9, 9);
        if (c == 0) c = 1;
        mp[Index::mixed(n, 0, j, mmix)] += Rat(c);
      } else {
        long long t0 = rng.uniform(1, 4) * (rng.uniform(0, 1) == 1 ? 1 : -1);
        mp[Index::mixed(n, 0, j, 1)] += Rat(3 * t0);
        mp[Index::mixed(n, 0, j, 2)] += Rat(4 * t0);
      }
    }
    if (mp.empty()) mp[Index::mixed(n, 0, 1, 1)] = 1;
    FinVec x = map_to_vec(IndexScheme{SchemeKind::mixed_sum}, mp);
    Rat total = 0;
    {
      std::map<long long, Rat> slot_sq;
      for (const auto& [ix, c] : x.entries) slot_sq[ix.v[2]] += c * c;
      for (const auto& [j, sq] : slot_sq) total += slot_norm_exact(sq);
    }
    x = fv_scale(x, 1 / total);
    record("r" + std::to_string(t), greedy_gap(x));
  }
  rep.pointwise_worst_f = to_f50(rep.pointwise_worst);
  rep.pointwise_bound = rat_str(Rat(1, n + 1));
  rep.pointwise_pass = rep.pointwise_worst <= Rat(1, n + 1);

  std::vector<FinVec> wits;
  for (long long j = 1; j <= 2 * n; ++j) {
    wits.push_back(slot_unit(n, j));
    rep.witnesses.push_back("slot" + std::to_string(j));
  }
  GapValue mm = minimax_gap(A, hull, wits, GapNorm::slot_max);
  rep.minimax_exact = mm.exact;
  rep.minimax_lower = mm.value;
  rep.minimax_lower_f = mm.value_f;
  rep.lambda = mm.lambda;
  rep.minimax_bound = "1/2";

  bool first = true;
  for (int s = 0; s < 50; ++s) {
    int terms = static_cast<int>(rng.uniform(2, 8));
    std::vector<std::vector<int>> sel;
    std::vector<int> idx;
    for (int i = 0; i < terms; ++i) {
      int id = static_cast<int>(rng.uniform(0, static_cast<long long>(Gs.size()) - 1));
      idx.push_back(id);
      sel.push_back(Gs[id]);
    }
    std::vector<Rat> lam = rng.simplex_point(terms);
    PigeonholeWitness pw = pigeonhole_witness(sel, lam, n);
    Rat bound = 1 - pw.coverage;
    ConvexCombination combo;
    for (int id : idx) combo.points.push_back(hull[id]);
    combo.weights = lam;
    FinVec gapv =
        fv_axpy(Rat(-1), combo_apply(combo, wits[pw.slot - 1]), A.apply(wits[pw.slot - 1]));
    if (fv_sup_abs(gapv) != bound) throw std::logic_error("witness gap disagrees with coverage");
    if (first || bound < rep.sampled_min) {
      rep.sampled_min = bound;
      first = false;
    }
  }
  rep.sampled_min_f = to_f50(rep.sampled_min);
  rep.minimax_pass = mm.value >= Rat(1, 2) && rep.sampled_min >= Rat(1, 2);

  std::vector<Rat> cov(2 * n + 1, Rat(0));
  for (size_t i = 0; i < hull.size(); ++i)
    for (int j : Gs[i]) cov[j] += mm.lambda[i];
  for (int j = 1; j <= 2 * n; ++j) rep.upper = std::max(rep.upper, Rat(1 - cov[j]));
  rep.upper_f = to_f50(rep.upper);
  rep.notes.push_back("witness span is the slot axes; its restricted norm is the slot-unit max");
  rep.pass = rep.pointwise_pass && rep.minimax_pass;
  return rep;
}

GapReport case_mixed(const CaseParams& prm) {
  int n = static_cast<int>(prm.n);
  if (n < 1 || n > 6) throw std::invalid_argument("budget exceeded: block must be in 1..6");
  if (prm.probes < 0 || prm.probes > 5000) throw std::invalid_argument("budget exceeded: probes");
  if (!(prm.p >= 1 && prm.p < prm.q)) throw std::invalid_argument("need 1 <= p < q");
  const int inner = 3;

  GapReport rep;
  rep.case_name = "mixed";
  rep.n = n;
  rep.p = prm.p;
  rep.q = prm.q;
  rep.probes = prm.probes;
  rep.seed = prm.seed;
  Rng rng(prm.seed);

  std::vector<int> all(2 * n);
  for (int j = 0; j < 2 * n; ++j) all[j] = j + 1;
  OperatorModel A = op_slot_selector(n, all, inner);
  auto Gs = subsets_of_size(2 * n, n);
  std::vector<OperatorModel> hull;
  hull.reserve(Gs.size());
  for (const auto& G : Gs) hull.push_back(op_slot_selector(n, G, inner));

  Rat r = (prm.q - prm.p) / (prm.p * prm.q);
  F50 bound = exp(-to_f50(r) * log(F50(n)));
  rep.pointwise_bound = "n^-r = " + f50_str(bound);
  F50 fp = to_f50(prm.p);

  F50 worst = 0;
  for (int t = 0; t < prm.probes; ++t) {
    coeff_map mp{index_less{IndexScheme{SchemeKind::mixed_sum}}};
    for (long long j = 1; j <= 2 * n; ++j) {
      long long kind = rng.uniform(0, 3);
      if (kind == 0) continue;
      long long cnt = rng.uniform(1, inner);
      for (long long mmix = 1; mmix <= cnt; ++mmix) {
        long long c = rng.uniform(-9, 9);
        if (c == 0) c = 1;
        mp[Index::mixed(n, 0, j, mmix)] += Rat(c, rng.uniform(1, 3));
      }
    }
    if (mp.empty()) mp[Index::mixed(n, 0, 1, 1)] = 1;
    FinVec x = map_to_vec(IndexScheme{SchemeKind::mixed_sum}, mp);

    std::vector<std::pair<F50, long long>> order;
    {
      std::map<long long, F50> mass;
      for (const auto& [ix, c] : x.entries)
        mass[ix.v[2]] += pow(abs(to_f50(c)), fp);
      for (long long j = 1; j <= 2 * n; ++j) {
        auto it = mass.find(j);
        order.push_back({it == mass.end() ? F50(0) : pow(it->second, 1 / fp), j});
      }
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<int> G;
    for (int i = 0; i < n; ++i) G.push_back(static_cast<int>(order[i].second));
    std::sort(G.begin(), G.end());

    FinVec diff = fv_axpy(Rat(-1), op_slot_selector(n, G, inner).apply(x), A.apply(x));
    F50 xnorm = mixed_pq_norm(x, prm.p, prm.p).value;
    F50 gnorm = diff.empty() ? F50(0) : mixed_pq_norm(diff, prm.p, prm.q).value;
    F50 ratio = gnorm / xnorm;
    rep.pointwise.push_back({"r" + std::to_string(t), f50_str(ratio)});
    if (ratio > worst) worst = ratio;
  }
  rep.pointwise_exact = false;
  rep.pointwise_worst_f = worst;
  rep.pointwise_pass = worst <= bound + F50(1e-9);

  std::vector<FinVec> wits;
  for (long long j = 1; j <= 2 * n; ++j) {
    wits.push_back(slot_unit(n, j));
    rep.witnesses.push_back("slot" + std::to_string(j));
  }
  GapValue mm = minimax_gap(A, hull, wits, GapNorm::slot_pq, prm.p, prm.q);
  rep.minimax_exact = mm.exact;
  rep.minimax_lower = mm.value;
  rep.minimax_lower_f = mm.value_f;
  rep.lambda = mm.lambda;
  rep.minimax_bound = "1/2 - 1e-6";

  bool first = true;
  for (int s = 0; s < 50; ++s) {
    int terms = static_cast<int>(rng.uniform(2, 8));
    std::vector<std::vector<int>> sel;
    std::vector<int> idx;
    for (int i = 0; i < terms; ++i) {
      int id = static_cast<int>(rng.uniform(0, static_cast<long long>(Gs.size()) - 1));
      idx.push_back(id);
      sel.push_back(Gs[id]);
    }
    std::vector<Rat> lam = rng.simplex_point(terms);
    PigeonholeWitness pw = pigeonhole_witness(sel, lam, n);
    Rat bnd = 1 - pw.coverage;
    ConvexCombination combo;
    for (int id : idx) combo.points.push_back(hull[id]);
    combo.weights = lam;
    FinVec gapv =
        fv_axpy(Rat(-1), combo_apply(combo, wits[pw.slot - 1]), A.apply(wits[pw.slot - 1]));
    if (fv_sup_abs(gapv) != bnd) throw std::logic_error("witness gap disagrees with coverage");
    if (first || bnd < rep.sampled_min) {
      rep.sampled_min = bnd;
      first = false;
    }
  }
  rep.sampled_min_f = to_f50(rep.sampled_min);
  rep.minimax_pass =
      mm.exact && mm.value >= Rat(1, 2) - Rat(1, 1000000) && rep.sampled_min >= Rat(1, 2);

  std::vector<Rat> cov(2 * n + 1, Rat(0));
  for (size_t i = 0; i < hull.size(); ++i)
    for (int j : Gs[i]) cov[j] += mm.lambda[i];
  for (int j = 1; j <= 2 * n; ++j) rep.upper = std::max(rep.upper, Rat(1 - cov[j]));
  rep.upper_f = to_f50(rep.upper);
  rep.notes.push_back("single-coordinate witnesses keep every norm evaluation rational");
  rep.pass = rep.pointwise_pass && rep.minimax_pass;
  return rep;
}

GapReport case_rank_one(const CaseParams& prm) {
  if (prm.probes < 0 || prm.probes > 5000) throw std::invalid_argument("budget exceeded: probes");

  GapReport rep;
  rep.case_name = "rank_one";
  rep.n = 2;
  rep.probes = prm.probes;
  rep.seed = prm.seed;
  Rng rng(prm.seed);
  OperatorModel I = op_identity2();

  // Norming-functional selector: pick the sup-attaining coordinate, pair the
  // sign functional with y itself renormalized; the rank-one image is y.
  auto selector_gap = [&](const FinVec& y) {
    Rat y1 = fv_coeff(y, Index::nat(1)), y2 = fv_coeff(y, Index::nat(2));
    Rat a1 = rat_abs(y1), a2 = rat_abs(y2);
    OperatorModel B = op_rank_one(0, 0, 0, 0);
    if (a1 != 0 || a2 != 0) {
      bool c1 = a1 >= a2;
      Rat yc = c1 ? y1 : y2;
      Rat sgn = yc > 0 ? Rat(1) : Rat(-1);
      Rat nrm = rat_abs(yc);
      B = op_rank_one(c1 ? sgn : Rat(0), c1 ? Rat(0) : sgn, y1 / nrm, y2 / nrm);
    }
    return fv_sup_abs(fv_axpy(Rat(-1), B.apply(y), I.apply(y)));
  };
  auto record = [&](const std::string& label, const Rat& g) {
    rep.pointwise.push_back({label, rat_str(g)});
    if (g > rep.pointwise_worst) rep.pointwise_worst = g;
  };
  int corner = 0;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) {
      FinVec y = fv_axpy(Rat(s2), nat_unit(2), fv_scale(nat_unit(1), Rat(s1)));
      record("corner" + std::to_string(++corner), selector_gap(y));
    }
  for (int t = 0; t < prm.probes; ++t) {
    Rat y1 = rng.rational(9, 3), y2 = rng.rational(9, 3);
    Rat mx = std::max(rat_abs(y1), rat_abs(y2));
    if (mx == 0) {
      y1 = 1;
      mx = 1;
    }
    FinVec y = fv_axpy(y2 / mx, nat_unit(2), fv_scale(nat_unit(1), y1 / mx));
    record("r" + std::to_string(t), selector_gap(y));
  }
  rep.pointwise_worst_f = to_f50(rep.pointwise_worst);
  rep.pointwise_bound = "0";
  rep.pointwise_pass = rep.pointwise_worst == 0;

  // Sampled hull points: five extreme rank-ones per mix, unit functional and
  // unit vector; the sup operator norm of I - B is the max absolute row sum.
  std::vector<OperatorModel> pool;
  bool first = true;
  for (int s = 0; s < 100; ++s) {
    ConvexCombination combo;
    for (int i = 0; i < 5; ++i) {
      long long d1 = rng.uniform(1, 9), d2 = rng.uniform(1, 9);
      Rat x1 = Rat(rng.uniform(-d1, d1), d1), x2 = Rat(rng.uniform(-d2, d2), d2);
      long long a = rng.uniform(-9, 9), b = rng.uniform(-9, 9);
      if (a == 0 && b == 0) a = 1;
      Rat tot = Rat(std::abs(a) + std::abs(b));
      combo.points.push_back(op_rank_one(Rat(a) / tot, Rat(b) / tot, x1, x2));
    }
    combo.weights = rng.simplex_point(5);
    FinVec c1 = combo_apply(combo, nat_unit(1));
    FinVec c2 = combo_apply(combo, nat_unit(2));
    Rat row1 = rat_abs(1 - fv_coeff(c1, Index::nat(1))) + rat_abs(fv_coeff(c2, Index::nat(1)));
    Rat row2 = rat_abs(fv_coeff(c1, Index::nat(2))) + rat_abs(1 - fv_coeff(c2, Index::nat(2)));
    Rat val = std::max(row1, row2);
    if (first || val < rep.sampled_min) {
      rep.sampled_min = val;
      first = false;
    }
    for (const auto& pt : combo.points) pool.push_back(pt);
  }
  rep.sampled_min_f = to_f50(rep.sampled_min);

  // The two sign vectors exhaust the sup unit ball, so the witness minimax
  // is exactly min over the sampled hull of ||I - B||.
  FinVec w1 = fv_add(nat_unit(1), nat_unit(2));
  FinVec w2 = fv_axpy(Rat(-1), nat_unit(2), nat_unit(1));
  rep.witnesses = {"(1,1)", "(1,-1)"};
  GapValue mm = minimax_gap(I, pool, {w1, w2}, GapNorm::sup);
  rep.minimax_exact = mm.exact;
  rep.minimax_lower = mm.value;
  rep.minimax_lower_f = mm.value_f;
  rep.lambda = mm.lambda;
  rep.minimax_bound = "1/5";

  auto dws = densify(I, pool, {w1, w2});
  descent_problem P = build_descent(dws, static_cast<int>(pool.size()), GapNorm::sup, Rat(2), Rat(2));
  descent_out dd = run_descent(P, prm.seed + 1);
  bool descent_ok = true;
  for (double v : dd.restart_values)
    if (v < 0.2 - 1e-9) descent_ok = false;
  rep.notes.push_back("descent endpoints (20 restarts) min = " + f50_str(F50(dd.best)));
  if (std::fabs(dd.best - static_cast<double>(mm.value_f)) > 1e-6)
    rep.notes.push_back("descent/lp disagreement above 1e-6");

  rep.minimax_pass = mm.value >= Rat(1, 5) && rep.sampled_min >= Rat(1, 5) && descent_ok;
  rep.upper = mm.value;
  rep.upper_f = mm.value_f;
  rep.pass = rep.pointwise_pass && rep.minimax_pass;
  return rep;
}

} // namespace

GapReport verify_case(const std::string& name, const CaseParams& prm) {
  if (name == "ell1") return case_ell1(prm);
  if (name == "calx") return case_calx(prm);
  if (name == "mixed") return case_mixed(prm);
  if (name == "rank_one" || name == "rank-one") return case_rank_one(prm);
  throw std::invalid_argument("unknown case: " + name);
}

} // namespace bsm
