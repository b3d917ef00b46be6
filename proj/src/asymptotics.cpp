#include "bsm/asymptotics.hpp"

#include "bsm/james.hpp"
#include "bsm/jtree.hpp"
#include "bsm/plegma.hpp"
#include "bsm/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bsm {

namespace {

FinVec nat_unit_at(long long i, const Rat& c) {
  FinVec v;
  v.scheme.kind = SchemeKind::natural;
  v.entries.push_back({Index::nat(i), c});
  return v;
}

FinVec dyadic_vec(const std::vector<std::pair<std::string, Rat>>& nodes) {
  FinVec v;
  v.scheme.kind = SchemeKind::dyadic;
  for (const auto& [nd, c] : nodes) v.entries.push_back({Index::dyadic(nd), c});
  fv_normalize(v);
  return v;
}

std::string mat_key(const std::vector<std::vector<Rat>>& a) {
  std::string s;
  for (const auto& row : a)
    for (const auto& c : row) {
      s += rat_str(c);
      s += ';';
    }
  return s;
}

std::string fam_str(const PlegmaFamily& fam) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < fam.rows.size(); ++i) {
    os << (i ? " | " : "");
    for (size_t j = 0; j < fam.rows[i].size(); ++j) os << (j ? "," : "") << fam.rows[i][j];
  }
  os << ")";
  return os.str();
}

F50 lp_norm_f50(const std::vector<Rat>& a, const Rat& p) {
  if (p == 1) {
    Rat s = 0;
    for (const auto& c : a) s += rat_abs(c);
    return to_f50(s);
  }
  if (p == 2) {
    Rat s = 0;
    for (const auto& c : a) s += c * c;
    return sqrt_f50(s);
  }
  F50 pf = to_f50(p);
  F50 s = 0;
  for (const auto& c : a) s += pow(abs(to_f50(c)), pf);
  return s == 0 ? F50(0) : pow(s, F50(1) / pf);
}

} // namespace

NormValue NormOracle::eval(const FinVec& x) const {
  NormValue out;
  if (ambient == "lp") {
    if (x.scheme.kind != SchemeKind::natural)
      throw std::invalid_argument("generator output in wrong ambient space");
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    if (p == 1) {
      Rat s = fv_lp_sum(x, 1);
      out.sq = s * s;
      out.value = to_f50(s);
    } else if (p == 2) {
      out.sq = fv_lp_sum(x, 2);
      out.value = sqrt_f50(out.sq);
    } else {
      out.exact = false;
      F50 pf = to_f50(p);
      F50 s = 0;
      for (const auto& [ix, c] : x.entries) s += pow(abs(to_f50(c)), pf);
      out.value = s == 0 ? F50(0) : pow(s, F50(1) / pf);
    }
    return out;
  }
  if (ambient == "james") {
    FinVec y = x;
    if (x.scheme.kind == SchemeKind::interleaved) y = james_materialize(x);
    if (y.scheme.kind != SchemeKind::natural)
      throw std::invalid_argument("generator output in wrong ambient space");
    out.sq = james_norm_sq(y).sq;
    out.value = sqrt_f50(out.sq);
    return out;
  }
  if (ambient == "jt") {
    if (x.scheme.kind != SchemeKind::dyadic)
      throw std::invalid_argument("generator output in wrong ambient space");
    out.sq = jt_norm_sq(x).sq;
    out.value = sqrt_f50(out.sq);
    return out;
  }
  throw std::invalid_argument("unknown ambient: " + ambient);
}

SequenceGenerator gen_lp_basis(const Rat& p, int l) {
  if (l < 1) throw std::invalid_argument("rows must be >= 1");
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  SequenceGenerator g;
  g.name = "lp_basis(p=" + rat_str(p) + ")";
  g.l = l;
  g.normalized = true;
  g.oracle = {"lp", p};
  g.at = [l](int i, long long n) {
    if (i < 1 || i > l || n < 1) throw std::invalid_argument("generator position out of range");
    return nat_unit_at((n - 1) * l + i, Rat(1));
  };
  return g;
}

SequenceGenerator gen_l1_blocks(int l) {
  if (l < 1) throw std::invalid_argument("rows must be >= 1");
  SequenceGenerator g;
  g.name = "l1_blocks";
  g.l = l;
  g.normalized = true;
  g.oracle = {"lp", Rat(1)};
  g.at = [l](int i, long long n) {
    if (i < 1 || i > l || n < 1) throw std::invalid_argument("generator position out of range");
    long long base = 2 * ((n - 1) * l + (i - 1));
    FinVec v = nat_unit_at(base + 1, Rat(1, 2));
    v.entries.push_back({Index::nat(base + 2), Rat(1, 2)});
    return v;
  };
  return g;
}

SequenceGenerator gen_james_pair() {
  SequenceGenerator g;
  g.name = "james_pair";
  g.l = 2;
  g.normalized = false;
  g.oracle = {"james", Rat(2)};
  g.at = [](int i, long long n) { return james_pair_vector(i, n); };
  return g;
}

SequenceGenerator gen_jt_level_block(int l) {
  if (l < 1 || l > 2) throw std::invalid_argument("rows must be 1 or 2");
  SequenceGenerator g;
  g.name = "jt_level_block";
  g.l = l;
  g.normalized = true;
  g.oracle = {"jt", Rat(2)};
  g.at = [l](int i, long long n) {
    if (i < 1 || i > l || n < 1) throw std::invalid_argument("generator position out of range");
    char anchor = i == 1 ? '0' : '1';
    if (n == 1) return dyadic_vec({{std::string(1, anchor), Rat(1)}});
    std::string r = std::string(1, anchor) + std::string(n - 2, '1') + "0";
    std::string pad(n - 2, '0');
    return dyadic_vec({{r + pad + "0", Rat(3, 5)}, {r + pad + "1", Rat(4, 5)}});
  };
  return g;
}

SequenceGenerator gen_from_vectors(std::string name, NormOracle oracle,
                                   std::vector<std::vector<FinVec>> lists, bool normalized) {
  if (lists.empty()) throw std::invalid_argument("no sequences");
  SequenceGenerator g;
  g.name = std::move(name);
  g.l = static_cast<int>(lists.size());
  g.normalized = normalized;
  g.oracle = std::move(oracle);
  auto data = std::make_shared<std::vector<std::vector<FinVec>>>(std::move(lists));
  g.at = [data](int i, long long n) {
    if (i < 1 || i > static_cast<int>(data->size()) || n < 1 ||
        n > static_cast<long long>((*data)[i - 1].size()))
      throw std::invalid_argument("generator position out of range");
    return (*data)[i - 1][n - 1];
  };
  return g;
}

StabilizationSchedule default_schedule(int k_max) {
  if (k_max < 1) throw std::invalid_argument("schedule length must be >= 1");
  StabilizationSchedule s;
  for (int k = 1; k <= k_max; ++k) s.deltas.push_back(Rat(1, Int(1) << k));
  return s;
}

CoeffNet default_net(int l, int k, unsigned long long seed, int random_count, int sign_cap) {
  if (l < 1 || k < 1) throw std::invalid_argument("net shape must be positive");
  CoeffNet net;
  net.l = l;
  net.k = k;
  int cells = l * k;
  auto push_patterns = [&](int base) {
    long long count = 1;
    for (int c = 0; c < cells; ++c) count *= base;
    for (long long m = 0; m < count; ++m) {
      long long code = m;
      std::vector<std::vector<Rat>> a(l, std::vector<Rat>(k, Rat(0)));
      bool nonzero = false;
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < k; ++j) {
          int d = static_cast<int>(code % base);
          code /= base;
          Rat v = base == 3 ? Rat(d - 1) : Rat(d == 0 ? -1 : 1);
          a[i][j] = v;
          if (v != 0) nonzero = true;
        }
      if (nonzero) net.mats.push_back(std::move(a));
    }
  };
  double pow3 = 1, pow2 = 1;
  for (int c = 0; c < cells; ++c) {
    pow3 *= 3;
    pow2 *= 2;
  }
  if (pow3 <= sign_cap)
    push_patterns(3);
  else if (pow2 <= sign_cap)
    push_patterns(2);
  else
    throw std::invalid_argument("sign pattern space exceeds the cap");
  Rng rng(seed);
  for (int t = 0; t < random_count; ++t) {
    std::vector<std::vector<Rat>> a(l, std::vector<Rat>(k));
    bool nonzero = false;
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < k; ++j) {
        long long d = rng.uniform(1, 9);
        a[i][j] = Rat(rng.uniform(-d, d), d);
        if (a[i][j] != 0) nonzero = true;
      }
    if (!nonzero) a[0][0] = 1;
    net.mats.push_back(std::move(a));
  }
  return net;
}

namespace {

struct NetEval {
  std::vector<JsmRow> rows;
  F50 osc_max{0};
  int worst = -1; // matrix index behind osc_max
  PlegmaFamily fam_lo, fam_hi;
};

} // namespace

JsmEstimate jsm_estimate(const SequenceGenerator& gen, int l, int k_max, const CoeffNet& net,
                         const StabilizationSchedule& sched, const std::vector<long long>& ground,
                         int node_budget) {
  if (gen.l != l) throw std::invalid_argument("generator row count mismatch");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (static_cast<int>(sched.deltas.size()) < k_max)
    throw std::invalid_argument("schedule too short");
  for (size_t i = 0; i < sched.deltas.size(); ++i)
    if (sched.deltas[i] <= 0 || (i > 0 && sched.deltas[i] >= sched.deltas[i - 1]))
      throw std::invalid_argument("schedule must be strictly decreasing positive");
  if (net.l != l) throw std::invalid_argument("net row count mismatch");
  if (net.k < k_max) throw std::invalid_argument("net too narrow for k_max");
  for (const auto& a : net.mats)
    for (const auto& row : a)
      for (const auto& c : row)
        if (c < -1 || c > 1) throw std::invalid_argument("net entry outside [-1,1]");
  for (size_t i = 0; i < ground.size(); ++i)
    if (ground[i] < 1 || (i > 0 && ground[i] <= ground[i - 1]))
      throw std::invalid_argument("ground set must be sorted distinct positive");
  if (node_budget < 0) node_budget = static_cast<int>(ground.size()) / 2;

  JsmEstimate est;
  est.l = l;
  est.L = ground;
  est.status = "stabilized";

  std::map<std::pair<int, long long>, FinVec> cache;
  auto vec = [&](int i, long long n) -> const FinVec& {
    auto key = std::make_pair(i, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    FinVec v = gen.at(i, n);
    if (gen.normalized) {
      NormValue nv = gen.oracle.eval(v);
      bool ok = nv.exact ? nv.sq == 1 : abs(nv.value - 1) <= F50(1e-12);
      if (!ok) throw std::logic_error("generator output not normalized");
    }
    return cache.emplace(key, std::move(v)).first->second;
  };
  auto combine = [&](const std::vector<std::vector<Rat>>& a, const PlegmaFamily& fam) {
    FinVec acc;
    bool first = true;
    for (int i = 0; i < l; ++i)
      for (size_t j = 0; j < a[i].size(); ++j) {
        if (a[i][j] == 0) continue;
        const FinVec& xi = vec(i + 1, fam.rows[i][j]);
        if (first) {
          acc = fv_scale(xi, a[i][j]);
          first = false;
        } else {
          acc = fv_axpy(a[i][j], xi, acc);
        }
      }
    if (first) {
      acc.scheme = vec(1, fam.rows[0][0]).scheme;
      acc.entries.clear();
    }
    return acc;
  };
  auto gated_families = [&](const std::vector<long long>& L, int k) {
    std::vector<PlegmaFamily> out;
    if (static_cast<int>(L.size()) < k) return out;
    long long gate = L[k - 1];
    for (auto& fam : plegma_enumerate(L, l, k, true))
      if (fam.rows[0][0] >= gate) out.push_back(std::move(fam));
    return out;
  };
  auto eval_net = [&](const std::vector<std::vector<std::vector<Rat>>>& mats,
                      const std::vector<PlegmaFamily>& fams) {
    NetEval ev;
    for (const auto& a : mats) {
      JsmRow row;
      row.a = a;
      bool all_exact = true, all_equal = true;
      F50 lo{0}, hi{0};
      PlegmaFamily flo, fhi;
      for (size_t f = 0; f < fams.size(); ++f) {
        NormValue nv = gen.oracle.eval(combine(a, fams[f]));
        if (f == 0) {
          row.rep = nv;
          lo = hi = nv.value;
          flo = fhi = fams[f];
        } else {
          if (nv.value < lo) {
            lo = nv.value;
            flo = fams[f];
          }
          if (nv.value > hi) {
            hi = nv.value;
            fhi = fams[f];
          }
          if (!nv.exact || !row.rep.exact || nv.sq != row.rep.sq) all_equal = false;
        }
        all_exact = all_exact && nv.exact;
      }
      row.osc = hi - lo;
      row.osc_zero = all_exact && all_equal;
      if (row.osc_zero) row.osc = 0;
      if (ev.worst < 0 || row.osc > ev.osc_max) {
        ev.osc_max = row.osc;
        ev.worst = static_cast<int>(ev.rows.size());
        ev.fam_lo = flo;
        ev.fam_hi = fhi;
      }
      ev.rows.push_back(std::move(row));
    }
    return ev;
  };

  std::vector<std::vector<std::vector<std::vector<Rat>>>> nets_k(k_max + 1);
  for (int k = 1; k <= k_max; ++k) {
    std::set<std::string> seen;
    for (const auto& a : net.mats) {
      std::vector<std::vector<Rat>> t(l, std::vector<Rat>(k));
      bool nonzero = false;
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < k; ++j) {
          t[i][j] = a[i][j];
          if (t[i][j] != 0) nonzero = true;
        }
      if (nonzero && seen.insert(mat_key(t)).second) nets_k[k].push_back(std::move(t));
    }
  }

  int removals_left = node_budget;
  for (int k = 1; k <= k_max; ++k) {
    const Rat& delta = sched.deltas[k - 1];
    while (true) {
      auto fams = gated_families(est.L, k);
      if (fams.empty()) {
        est.status = "no gated families";
        est.failing_k = k;
        return est;
      }
      NetEval ev = eval_net(est.L, k, nets_k[k], fams);
      if (ev.osc_max < to_f50(delta)) {
        est.table.push_back(std::move(ev.rows));
        est.osc_per_k.push_back(ev.osc_max);
        est.k = k;
        break;
      }
      if (removals_left > 0 && est.L.size() > static_cast<size_t>(l) * k) {
        // drop the element whose removal shrinks the worst oscillation most
        size_t best_e = 0;
        F50 best_osc{-1};
        for (size_t e = 0; e < est.L.size(); ++e) {
          std::vector<long long> trial = est.L;
          trial.erase(trial.begin() + e);
          auto tf = gated_families(trial, k);
          if (tf.empty()) continue;
          NetEval tev = eval_net(trial, k, nets_k[k], tf);
          if (best_osc < 0 || tev.osc_max < best_osc) {
            best_osc = tev.osc_max;
            best_e = e;
          }
        }
        if (best_osc >= 0) {
          est.L.erase(est.L.begin() + best_e);
          --removals_left;
          continue;
        }
      }
      est.status = "not stabilized";
      est.failing_k = k;
      std::ostringstream os;
      os << "matrix " << mat_key(nets_k[k][ev.worst]) << " families " << fam_str(ev.fam_lo)
         << " vs " << fam_str(ev.fam_hi);
      est.witness = os.str();
      return est;
    }
  }

  for (const Rat& cp : {Rat(1), Rat(3, 2), Rat(2), Rat(3)})
    est.equiv.push_back({cp, equivalence_constant(est, cp).value});

  if (static_cast<long long>(l) * est.k <= 12) {
    auto fams = gated_families(est.L, est.k);
    if (!fams.empty()) {
      const PlegmaFamily& fam = fams.front();
      std::vector<FinVec> vs;
      std::vector<std::vector<Rat>> rows;
      for (int j = 0; j < est.k; ++j)
        for (int i = 0; i < l; ++i) vs.push_back(vec(i + 1, fam.rows[i][j]));
      for (const auto& a : nets_k[est.k]) {
        std::vector<Rat> r;
        for (int j = 0; j < est.k; ++j)
          for (int i = 0; i < l; ++i) r.push_back(a[i][j]);
        rows.push_back(std::move(r));
      }
      est.suppression = suppression_constant(vs, gen.oracle, rows).value;
      est.suppression_set = true;
    }
  }
  return est;
}

EquivEstimate equivalence_constant(const JsmEstimate& table, const Rat& p) {
  if (table.k < 1 || table.table.empty() || table.table[table.k - 1].empty())
    throw std::invalid_argument("empty table");
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  EquivEstimate out;
  out.exact = true;
  Rat best_sq = 0;
  F50 best_f = 0;
  for (const auto& row : table.table[table.k - 1]) {
    std::vector<Rat> flat;
    for (const auto& r : row.a) flat.insert(flat.end(), r.begin(), r.end());
    if (row.rep.value == 0) throw std::logic_error("zero norm in table");
    F50 ap = lp_norm_f50(flat, p);
    best_f = std::max(best_f, F50(std::max(ap / row.rep.value, row.rep.value / ap)));
    if ((p == 1 || p == 2) && row.rep.exact) {
      Rat asq = 0;
      if (p == 2) {
        for (const auto& c : flat) asq += c * c;
      } else {
        Rat s = 0;
        for (const auto& c : flat) s += rat_abs(c);
        asq = s * s;
      }
      Rat r2 = std::max(Rat(asq / row.rep.sq), Rat(row.rep.sq / asq));
      best_sq = std::max(best_sq, r2);
    } else {
      out.exact = false;
    }
  }
  if (out.exact) {
    out.sq = best_sq;
    out.value = sqrt_f50(best_sq);
  } else {
    out.value = best_f;
  }
  return out;
}

SuppressionEstimate suppression_constant(const std::vector<FinVec>& vectors,
                                         const NormOracle& oracle,
                                         const std::vector<std::vector<Rat>>& coeff_rows) {
  if (vectors.empty()) throw std::invalid_argument("no vectors");
  if (vectors.size() > 16) throw std::invalid_argument("too many vectors for subset enumeration");
  if (coeff_rows.empty()) throw std::invalid_argument("no coefficient rows");
  int n = static_cast<int>(vectors.size());
  for (const auto& row : coeff_rows) {
    if (row.size() != vectors.size())
      throw std::invalid_argument("coefficient row length mismatch");
    bool nonzero = false;
    for (const auto& c : row) nonzero = nonzero || c != 0;
    if (!nonzero) throw std::invalid_argument("all-zero coefficient row");
  }
  SuppressionEstimate out;
  out.exact = true;
  Rat best_sq = 0;
  F50 best_f{0};
  auto accumulate = [&](const std::vector<Rat>& row, unsigned mask) {
    FinVec acc;
    bool first = true;
    for (int v = 0; v < n; ++v) {
      if (!(mask & (1u << v)) || row[v] == 0) continue;
      if (first) {
        acc = fv_scale(vectors[v], row[v]);
        first = false;
      } else {
        acc = fv_axpy(row[v], vectors[v], acc);
      }
    }
    if (first) {
      acc.scheme = vectors[0].scheme;
      acc.entries.clear();
    }
    return acc;
  };
  unsigned full = (1u << n) - 1;
  for (size_t ri = 0; ri < coeff_rows.size(); ++ri) {
    const auto& row = coeff_rows[ri];
    NormValue tot = oracle.eval(accumulate(row, full));
    if (tot.value == 0) throw std::logic_error("zero norm at a nonzero coefficient row");
    for (unsigned mask = 1; mask < full; ++mask) {
      NormValue sub = oracle.eval(accumulate(row, mask));
      if (tot.exact && sub.exact) {
        Rat r2 = sub.sq / tot.sq;
        if (r2 > best_sq) {
          best_sq = r2;
          std::ostringstream os;
          os << "row=" << ri << " mask=" << mask;
          out.witness = os.str();
        }
      } else {
        out.exact = false;
        F50 r = sub.value / tot.value;
        if (r > best_f) {
          best_f = r;
          std::ostringstream os;
          os << "row=" << ri << " mask=" << mask;
          out.witness = os.str();
        }
      }
    }
  }
  if (out.exact) {
    out.sq = best_sq;
    out.value = sqrt_f50(best_sq);
  } else {
    out.value = std::max(best_f, sqrt_f50(best_sq));
  }
  return out;
}

LevelBlockFamily build_level_block_family(int depth_budget, int n_families, int l, int variant) {
  if (n_families < 1) throw std::invalid_argument("need at least one band");
  if (l < 1 || l > 2) throw std::invalid_argument("rows must be 1 or 2");
  if (2 * n_families - 1 > depth_budget) throw std::invalid_argument("depth budget too small");
  LevelBlockFamily fam;
  Rng rng(static_cast<unsigned long long>(variant) * 1000003ULL +
          static_cast<unsigned long long>(n_families) * 101ULL + static_cast<unsigned long long>(l));
  for (int n = 1; n <= n_families; ++n) {
    fam.bands.push_back({2 * n - 1, 2 * n - 1});
    std::vector<FinVec> set;
    for (int i = 1; i <= l; ++i) {
      char anchor = i == 1 ? '0' : '1';
      Rat s1 = rng.uniform(0, 1) ? Rat(1) : Rat(-1);
      Rat s2 = rng.uniform(0, 1) ? Rat(1) : Rat(-1);
      if (n == 1) {
        set.push_back(dyadic_vec({{std::string(1, anchor), s1}}));
        continue;
      }
      std::string r = std::string(1, anchor) + std::string(n - 2, '1') + "0";
      std::string pad(n - 2, '0');
      if (rng.uniform(0, 1) == 0) {
        set.push_back(dyadic_vec({{r + pad + "0", s1}}));
      } else {
        set.push_back(dyadic_vec({{r + pad + "0", s1 * Rat(3, 5)}, {r + pad + "1", s2 * Rat(4, 5)}}));
      }
    }
    fam.sets.push_back(std::move(set));
  }
  fam.eps = Rat(1, 16);
  for (int n = 1; n <= n_families; ++n) fam.eps_seq.push_back(Rat(1, Int(1) << (2 * (n + 8))));
  fam.cert_ii = 0;
  for (int n = 1; n <= n_families; ++n) {
    Rat inner = 0;
    for (int i = n; i <= n_families; ++i) inner += Rat(i + 1) * fam.eps_seq[i - 1];
    fam.cert_ii += Rat(Int(1) << fam.bands[n - 1].hi) * inner;
  }
  if (fam.cert_ii >= fam.eps) throw std::logic_error("builder epsilon budget overflow");
  return fam;
}

LevelBlockCheck level_block_check(const LevelBlockFamily& fam, const std::vector<Rat>& coeffs) {
  size_t N = fam.bands.size();
  if (N == 0 || fam.sets.size() != N) throw std::invalid_argument("family shape mismatch");
  if (coeffs.size() != N) throw std::invalid_argument("coefficient length mismatch");
  Rat coeff_sq = 0;
  for (const auto& c : coeffs) coeff_sq += c * c;
  if (coeff_sq == 0) throw std::invalid_argument("all-zero coefficients");
  for (size_t n = 0; n < N; ++n) {
    const auto& b = fam.bands[n];
    if (b.lo < 0 || b.hi < b.lo || (n > 0 && fam.bands[n - 1].hi >= b.lo))
      throw std::invalid_argument("band ordering violated");
    if (fam.sets[n].empty()) throw std::invalid_argument("empty band set");
    for (const auto& x : fam.sets[n]) {
      if (x.scheme.kind != SchemeKind::dyadic)
        throw std::invalid_argument("vector in wrong ambient");
      for (const auto& [ix, c] : x.entries) {
        int d = static_cast<int>(ix.node.size());
        if (d < b.lo || d > b.hi)
          throw std::invalid_argument("vector support outside its band");
      }
      if (jt_norm_sq(x).sq != 1) throw std::invalid_argument("vector not normalized");
    }
  }
  if (fam.eps_seq.size() != N || fam.eps <= 0)
    throw std::invalid_argument("epsilon ladder not strictly decreasing positive");
  for (size_t n = 0; n < N; ++n)
    if (fam.eps_seq[n] <= 0 || (n > 0 && fam.eps_seq[n] >= fam.eps_seq[n - 1]))
      throw std::invalid_argument("epsilon ladder not strictly decreasing positive");

  // hypothesis (i): initial segments end at support-relevant nodes
  std::set<std::string> closure;
  for (const auto& set : fam.sets)
    for (const auto& x : set)
      for (const auto& [ix, c] : x.entries) {
        std::string nd = ix.node;
        closure.insert(nd);
        while (!nd.empty()) {
          nd.pop_back();
          closure.insert(nd);
        }
      }
  for (const auto& t : closure) {
    for (size_t n = 1; n < N; ++n) {
      int caught = 0;
      for (size_t m = n + 1; m <= N; ++m) {
        bool hit = false;
        for (const auto& x : fam.sets[m - 1]) {
          Rat s = 0;
          for (const auto& [ix, c] : x.entries)
            if (node_is_prefix(ix.node, t)) s += c;
          if (rat_abs(s) >= fam.eps_seq[n - 1]) {
            hit = true;
            break;
          }
        }
        if (hit) ++caught;
      }
      if (caught > 1) throw std::invalid_argument("segment separation violated");
    }
  }

  // hypothesis (ii), tail zero past the prefix
  Rat cert = 0;
  for (size_t n = 1; n <= N; ++n) {
    Rat inner = 0;
    for (size_t i = n; i <= N; ++i) inner += Rat(Int(i + 1)) * fam.eps_seq[i - 1];
    cert += Rat(Int(1) << fam.bands[n - 1].hi) * inner;
  }
  if (cert != fam.cert_ii) throw std::invalid_argument("certificate mismatch");
  if (cert >= fam.eps) throw std::invalid_argument("epsilon budget exceeded");

  long long selections = 1;
  for (const auto& set : fam.sets) {
    selections *= static_cast<long long>(set.size());
    if (selections > 4096) throw std::invalid_argument("too many selections");
  }
  LevelBlockCheck out;
  out.selections = static_cast<int>(selections);
  std::vector<size_t> sel(N, 0);
  bool first = true;
  while (true) {
    FinVec acc;
    acc.scheme.kind = SchemeKind::dyadic;
    for (size_t n = 0; n < N; ++n)
      if (coeffs[n] != 0) acc = fv_axpy(coeffs[n], fam.sets[n][sel[n]], acc);
    Rat ratio = jt_norm_sq(acc).sq / coeff_sq;
    if (first) {
      out.lower = out.upper = ratio;
      first = false;
    } else {
      out.lower = std::min(out.lower, ratio);
      out.upper = std::max(out.upper, ratio);
    }
    size_t pos = 0;
    while (pos < N && ++sel[pos] == fam.sets[pos].size()) sel[pos++] = 0;
    if (pos == N) break;
  }
  if (out.lower < 1) throw std::runtime_error("lower ratio below 1");
  Rat d = out.upper - 2 - fam.eps * fam.eps;
  if (d > 0 && d * d > 8 * fam.eps * fam.eps)
    throw std::runtime_error("upper ratio above the sqrt2 budget");
  return out;
}

} // namespace bsm
