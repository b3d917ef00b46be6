#include "bsm/mr.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace bsm {

BigNat MuSequence::m(const BigNat& j) {
  return BigNat::pow2(BigNat::pow2(j + Int(1)));
}

BigNat MuSequence::mu(const BigNat& j) {
  return BigNat::pow2(BigNat::pow2(j + Int(2)));
}

bool MuSequence::literal_j(const BigNat& j, unsigned max_j) {
  return j.is_literal() && j.literal_value() <= max_j;
}

Rat MuSequence::inv_m(const BigNat& j) {
  if (!j.is_literal() || j.literal_value() < 1 || j.literal_value() > 16)
    throw std::invalid_argument("1/m_j is only materialized for literal j <= 16");
  unsigned jj = static_cast<unsigned>(j.literal_value());
  Int m = Int(1) << (1u << (jj + 1));
  return Rat(1, m);
}

Rat MuSequence::cross_weight_certificate(unsigned prefix) {
  if (prefix < 1 || prefix > 10)
    throw std::invalid_argument("certificate prefix out of range");
  auto lit_m = [](unsigned j) { return Int(1) << (1u << (j + 1)); };
  Rat total = 0;
  // exact block: i <= prefix, j <= prefix+1
  for (unsigned i = 1; i <= prefix; ++i)
    for (unsigned j = i + 1; j <= prefix + 1; ++j)
      total += Rat(lit_m(i), lit_m(j));
  // tails for i <= prefix, j >= prefix+2: consecutive ratios m_j/m_{j+1}
  // are <= 1/16, so sum_{j >= J} 1/m_j <= (16/15)/m_J
  for (unsigned i = 1; i <= prefix; ++i)
    total += Rat(16, 15) * Rat(lit_m(i), lit_m(prefix + 2));
  // tails for i > prefix: m_i/m_{i+1} <= 16^{-i}
  Int p16 = 1;
  for (unsigned t = 0; t <= prefix; ++t) p16 *= 16;
  total += Rat(256, 225) / Rat(p16);
  if (total > Rat(1, 2))
    throw std::logic_error("cross-weight certificate exceeded 1/2");
  return total;
}

SigmaRegistry::SigmaRegistry(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto doc = nlohmann::json::parse(line);
    std::string key = doc.at("prefix").get<std::string>();
    BigNat val = BigNat::parse(doc.at("sigma").get<std::string>());
    if (table_.count(key)) throw std::runtime_error("duplicate registry prefix: " + key);
    table_.emplace(key, val);
    order_.push_back(key);
  }
}

BigNat SigmaRegistry::sigma(const std::string& prefix_key, const BigNat& max_card) {
  auto it = table_.find(prefix_key);
  if (it != table_.end()) return it->second;
  BigNat value = max_card + Int(1) + Int(static_cast<long long>(order_.size()));
  table_.emplace(prefix_key, value);
  order_.push_back(prefix_key);
  append_log(prefix_key, value);
  return value;
}

std::optional<BigNat> SigmaRegistry::peek(const std::string& prefix_key) const {
  auto it = table_.find(prefix_key);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void SigmaRegistry::append_log(const std::string& key, const BigNat& value) {
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to registry log: " + path_);
  nlohmann::json doc;
  doc["prefix"] = key;
  doc["sigma"] = value.str();
  out << doc.dump() << "\n";
}

std::string special_prefix_key(const std::vector<SpecialPair>& prefix) {
  std::string key;
  for (const auto& p : prefix)
    key += "j=" + p.j.str() + ",a=" + p.s1.str() + ",b=" + p.s2.str() + ";";
  return key;
}

SpecialVectors build_special_vectors(int n, SigmaRegistry& reg) {
  if (n < 1) throw std::invalid_argument("special sequence length must be >= 1");
  SpecialVectors out;
  BigNat next1(Int(1)), next2(Int(1)), e2_prev(Int(0));
  BigNat max_card(Int(0));
  for (int k = 1; k <= n; ++k) {
    BigNat j = k == 1 ? BigNat(Int(1))
                      : reg.sigma(special_prefix_key(out.seq), max_card);
    if (k > 1 && !(j > out.seq.back().j))
      throw std::logic_error("registry produced a non-increasing weight");
    BigNat len = MuSequence::mu(j);
    BigNat s1 = BigNat::max(next1, e2_prev + Int(1));
    BigNat e1 = s1 + len - Int(1);
    BigNat s2 = BigNat::max(next2, e1);
    BigNat e2 = s2 + len - Int(1);
    next1 = e1 + Int(1);
    next2 = e2 + Int(1);
    e2_prev = e2;
    max_card = BigNat::max(max_card, len);
    out.seq.push_back({j, s1, s2});

    RleVec v1, v2;
    v1.runs.push_back({1, s1, len, Rat(1), j});
    v2.runs.push_back({2, s2, len, Rat(1), j});
    rle_normalize(v1);
    rle_normalize(v2);
    out.x1.push_back(v1);
    out.x2.push_back(v2);
    out.plus = rle_add_aligned(out.plus, rle_add_aligned(v1, v2));
    out.alternating =
        rle_add_aligned(out.alternating, rle_add_aligned(rle_scale(v1, Rat(-1)), v2));
  }
  return out;
}

namespace {

constexpr long long kSmallRegimeBound = 511; // 2*mu_1 - 1

const Rat& tiny_inv_bound() {
  // 1/m_j <= 1/m_5 whenever j lies beyond the literal window
  static const Rat v = Rat(1, Int(1) << 64);
  return v;
}

struct LineMass {
  // literal-geometry coordinate masses within one line, for fill scans
  std::vector<std::pair<Int, Rat>> untagged;
  std::vector<std::pair<Int, Rat>> all; // untagged + small literal-weight runs
  Int total_len = 0;
};

Rat fill_value(std::vector<std::pair<Int, Rat>> mass, const Int& budget) {
  std::sort(mass.begin(), mass.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  Int rem = budget;
  Rat v = 0;
  for (const auto& [len, val] : mass) {
    if (rem <= 0) break;
    Int take = len < rem ? len : rem;
    v += Rat(take) * val;
    rem -= take;
  }
  return v;
}

struct PairView {
  SpecialPair geom;
  Rat s1, s2; // scalars of the two runs
};

} // namespace

MrBounds mr_norm_bounds(const RleVec& x, const SigmaRegistry* reg) {
  MrBounds out;
  out.lower = 0;
  out.upper = 0;
  if (x.runs.empty()) {
    out.exact = true;
    return out;
  }

  auto cand = [&](const std::string& name, const Rat& v) {
    out.candidates.push_back({name, rat_str(v)});
    if (v > out.lower) out.lower = v;
  };

  // regime classification: with every coordinate at or below 511 = 2*mu_1 - 1,
  // a weighted set (cardinality >= mu_1 = 256) fits below only as an initial
  // block of line 1, so no pair of successive weighted sets sees the vector
  // twice and the supremum reduces to singletons plus one weighted set per line
  bool small = true;
  for (const auto& r : x.runs) {
    if (!r.start.is_literal() || !r.len.is_literal()) { small = false; break; }
    if (r.inv_weight && !MuSequence::literal_j(*r.inv_weight, 16)) { small = false; break; }
    Int end = r.start.literal_value() + r.len.literal_value() - 1;
    Int global_end = r.line == 1 ? Int(2 * end - 1) : Int(2 * end);
    if (global_end > kSmallRegimeBound) { small = false; break; }
  }

  if (small) {
    Rat w0 = 0, l1 = 0, l2 = 0;
    for (const auto& r : x.runs) {
      Rat v = rat_abs(r.scalar);
      if (r.inv_weight) v *= MuSequence::inv_m(*r.inv_weight);
      w0 = std::max(w0, v);
      (r.line == 1 ? l1 : l2) += Rat(r.len.literal_value()) * v;
    }
    cand("w0_max_coordinate", w0);
    cand("w1_line1_full", l1 / 16);
    cand("w1_line2_full", l2 / 16);
    out.upper = out.lower;
    out.exact = true;
    return out;
  }

  // general sandwich
  const Int mass_cap = Int(1) << 20;
  LineMass mass[3]; // indexed by line
  Rat maxs_tagged[3] = {Rat(0), Rat(0), Rat(0)};
  for (const auto& r : x.runs) {
    Rat sabs = rat_abs(r.scalar);
    if (!r.inv_weight) {
      if (!r.len.is_literal())
        throw std::invalid_argument(
            "untagged run with symbolic length has no finite certified bound");
      cand("w0_untagged", sabs);
      mass[r.line].untagged.push_back({r.len.literal_value(), sabs});
      mass[r.line].all.push_back({r.len.literal_value(), sabs});
      mass[r.line].total_len += r.len.literal_value();
      continue;
    }
    maxs_tagged[r.line] = std::max(maxs_tagged[r.line], sabs);
    BigNat muj = MuSequence::mu(*r.inv_weight);
    if (r.len >= muj) {
      // a weighted set of matching weight covers mu_j coordinates of the run
      cand("w1_aligned_j(" + r.inv_weight->str() + ")", sabs);
    } else if (r.len.is_literal() && muj.is_literal()) {
      cand("w1_aligned_partial_j(" + r.inv_weight->str() + ")",
           sabs * Rat(r.len.literal_value(), muj.literal_value()));
    }
    if (MuSequence::literal_j(*r.inv_weight, 16)) {
      Rat v = sabs * MuSequence::inv_m(*r.inv_weight);
      cand("w0_tagged", v);
      if (r.len.is_literal() && r.len.literal_value() <= mass_cap) {
        mass[r.line].all.push_back({r.len.literal_value(), v});
        mass[r.line].total_len += r.len.literal_value();
      }
    }
  }

  // literal fill scans per line; candidate values come from the combined
  // mass, bound values from the untagged part only (weighted runs are
  // accounted for through their scalars)
  Rat scanmax_untagged[3] = {Rat(0), Rat(0), Rat(0)};
  Rat scansum_untagged[3] = {Rat(0), Rat(0), Rat(0)};
  for (int line = 1; line <= 2; ++line) {
    if (mass[line].all.empty()) continue;
    Rat full_untagged = 0;
    for (const auto& [len, val] : mass[line].untagged) full_untagged += Rat(len) * val;
    Int mu_t = 256;
    unsigned t = 1;
    for (;; ++t) {
      if (t > 11)
        throw std::invalid_argument("literal mass too large for the fill scan");
      Rat inv = MuSequence::inv_m(BigNat(Int(t)));
      cand("w1_fill_line" + std::to_string(line) + "_t" + std::to_string(t),
           fill_value(mass[line].all, mu_t) * inv);
      Rat v_un = fill_value(mass[line].untagged, mu_t) * inv;
      scanmax_untagged[line] = std::max(scanmax_untagged[line], v_un);
      scansum_untagged[line] += v_un;
      if (mu_t >= mass[line].total_len) break;
      mu_t *= mu_t; // mu_{t+1} = mu_t^2
    }
    // weights past saturation act on the full mass with geometric decay
    scansum_untagged[line] +=
        full_untagged * Rat(16, 15) * MuSequence::inv_m(BigNat(Int(t + 1)));
  }

  // weight-aligned pair structure, validated against the registry; the first
  // weight must stay at or below 256 so it cannot collide with any registry
  // value (those exceed mu_1 = 256) off the common prefix
  std::vector<PairView> pairs;
  bool validated = false;
  {
    std::vector<const RleRun*> tagged;
    for (const auto& r : x.runs)
      if (r.inv_weight) tagged.push_back(&r);
    std::sort(tagged.begin(), tagged.end(), [](const RleRun* a, const RleRun* b) {
      if (!(a->start == b->start)) return a->start < b->start;
      return a->line < b->line;
    });
    bool shape_ok = !tagged.empty() && tagged.size() % 2 == 0;
    for (size_t i = 0; shape_ok && i + 1 < tagged.size(); i += 2) {
      const RleRun *r1 = tagged[i], *r2 = tagged[i + 1];
      shape_ok = r1->line == 1 && r2->line == 2 && *r1->inv_weight == *r2->inv_weight &&
                 r1->len == MuSequence::mu(*r1->inv_weight) && r2->len == r1->len;
      if (!shape_ok) break;
      PairView pv;
      pv.geom = {*r1->inv_weight, r1->start, r2->start};
      pv.s1 = r1->scalar;
      pv.s2 = r2->scalar;
      pairs.push_back(pv);
    }
    if (shape_ok && !pairs.empty()) {
      validated = pairs[0].geom.j <= BigNat(Int(256));
      BigNat prev_e2(Int(0));
      std::vector<SpecialPair> prefix;
      for (size_t k = 0; validated && k < pairs.size(); ++k) {
        const auto& g = pairs[k].geom;
        BigNat e1 = g.s1 + g.len() - Int(1);
        if (k > 0 && (!(g.j > pairs[k - 1].geom.j) || !(g.s1 > prev_e2)))
          validated = false;
        if (!(g.s2 >= e1)) validated = false;
        if (k > 0 && validated) {
          if (!reg) {
            validated = false;
          } else {
            auto expect = reg->peek(special_prefix_key(prefix));
            if (!expect || !(*expect == g.j)) validated = false;
          }
        }
        if (!validated) break;
        prev_e2 = g.s2 + g.len() - Int(1);
        prefix.push_back(g);
      }
    }
    if (!validated) pairs.clear();
  }

  size_t npairs = pairs.size();
  Rat maxwin = 0;
  if (validated) {
    // interval cuts of the canonical aligned functional realize each window
    // together with the neighbouring half sets
    for (size_t a = 0; a < npairs; ++a) {
      Rat base = 0;
      for (size_t b = a; b < npairs; ++b) {
        base += rat_abs(pairs[b].s1 + pairs[b].s2);
        maxwin = std::max(maxwin, base);
        for (int left = 0; left < 2; ++left)
          for (int right = 0; right < 2; ++right) {
            Rat v = base;
            if (left) {
              if (a == 0) continue;
              v += rat_abs(pairs[a - 1].s2);
            }
            if (right) {
              if (b + 1 >= npairs) continue;
              v += rat_abs(pairs[b + 1].s1);
            }
            cand("w2_window(" + std::to_string(a + 1) + ".." + std::to_string(b + 1) +
                     (left ? ",lhalf" : "") + (right ? ",rhalf" : "") + ")",
                 v);
          }
      }
    }
  }

  // upper bound assembly over the three functional classes and their cuts
  Rat w0b = 0;
  for (const auto& r : x.runs) {
    Rat v = rat_abs(r.scalar);
    if (r.inv_weight)
      v *= MuSequence::literal_j(*r.inv_weight, 16) ? MuSequence::inv_m(*r.inv_weight)
                                                    : tiny_inv_bound();
    w0b = std::max(w0b, v);
  }
  Rat w1b = 0;
  for (int line = 1; line <= 2; ++line) {
    // aligned cover <= max scalar, distinct-weight covers <= half of it,
    // untagged coordinates <= the best single fill
    Rat b = maxs_tagged[line] * Rat(3, 2) + scanmax_untagged[line];
    w1b = std::max(w1b, b);
  }
  Rat w2b;
  Rat untagged_feed = scansum_untagged[1] + scansum_untagged[2];
  if (validated) {
    // common-prefix windows cancel into maxwin; at most two cut boundary
    // pairs, one set-divergence pair, and cross-weight tails of 1/2 per line
    Rat cutallow = 0, divallow = 0;
    for (const auto& p : pairs) {
      Rat a1 = rat_abs(p.s1), a2 = rat_abs(p.s2);
      cutallow = std::max(cutallow, std::max(std::max(a1, a2), rat_abs(p.s1 + p.s2)));
      divallow = std::max(divallow, Rat(a1 + a2));
    }
    Rat tailallow = (maxs_tagged[1] + maxs_tagged[2]) / 2;
    w2b = maxwin + Rat(2) * cutallow + divallow + tailallow + untagged_feed;
  } else {
    // every weighted run meets at most one component of matching weight
    Rat aligned_total = 0;
    for (const auto& r : x.runs)
      if (r.inv_weight) aligned_total += rat_abs(r.scalar);
    w2b = aligned_total + std::max(maxs_tagged[1], maxs_tagged[2]) + untagged_feed;
  }
  out.upper = std::max(std::max(w0b, w1b), std::max(w2b, out.lower));
  out.exact = false;
  return out;
}

MrBounds mr_norm_bounds(const FinVec& x) {
  if (x.scheme.kind != SchemeKind::mr_line && x.scheme.kind != SchemeKind::natural)
    throw std::invalid_argument("mr bounds need natural or mr_line coordinates");
  RleVec v;
  for (const auto& [ix, c] : x.entries) {
    long long n = ix.v[0];
    RleRun r;
    r.line = n % 2 == 1 ? 1 : 2;
    r.start = BigNat(Int(n % 2 == 1 ? (n + 1) / 2 : n / 2));
    r.len = BigNat(Int(1));
    r.scalar = c;
    v.runs.push_back(r);
  }
  rle_normalize(v);
  return mr_norm_bounds(v, nullptr);
}

} // namespace bsm
