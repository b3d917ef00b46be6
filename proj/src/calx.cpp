#include "bsm/calx.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

namespace bsm {

namespace {

using SlotKey = std::tuple<long long, int, long long>; // (block, part, slot)

std::map<SlotKey, Rat> slot_squares(const FinVec& x) {
  if (x.scheme.kind != SchemeKind::mixed_sum)
    throw std::invalid_argument("expected a mixed_sum vector");
  std::map<SlotKey, Rat> sq;
  for (const auto& [ix, a] : x.entries) {
    long long n = ix.v[0], j = ix.v[2], m = ix.v[3];
    int part = static_cast<int>(ix.v[1]);
    if (n < 1 || (part != 0 && part != 1) || j < 1 || j > 2 * n || m < 1)
      throw std::invalid_argument("invalid slot index (" + std::to_string(n) + "," +
                                  std::to_string(part) + "," + std::to_string(j) + "," +
                                  std::to_string(m) + ")");
    sq[{n, part, j}] += a * a;
  }
  return sq;
}

} // namespace

CalxNormSq calx_norm_sq(const FinVec& x) {
  auto sq = slot_squares(x);
  RadicalSum total;
  auto it = sq.begin();
  while (it != sq.end()) {
    long long n = std::get<0>(it->first);
    int part = std::get<1>(it->first);
    std::vector<Rat> slots;
    while (it != sq.end() && std::get<0>(it->first) == n && std::get<1>(it->first) == part)
      slots.push_back((it++)->second);
    if (part == 1) {
      total = total + RadicalSum::of_rat(*std::max_element(slots.begin(), slots.end()));
      continue;
    }
    // (sum_j sqrt(s_j))^2 = sum s_j + 2 sum_{j<j'} sqrt(s_j s_j')
    for (const auto& s : slots) total = total + RadicalSum::of_rat(s);
    for (size_t a = 0; a < slots.size(); ++a)
      for (size_t b = a + 1; b < slots.size(); ++b)
        total = total + RadicalSum::of_sqrt(slots[a] * slots[b]) * Rat(2);
  }
  return {total, total.decimal(12)};
}

Rat slot_norm_exact(const Rat& slot_sq) {
  Int pr, qr;
  if (slot_sq < 0 || !is_square(rat_num(slot_sq), &pr) || !is_square(rat_den(slot_sq), &qr))
    throw std::domain_error("slot square " + rat_str(slot_sq) + " is not a rational square");
  return Rat(pr, qr);
}

MixedNorm mixed_pq_norm(const FinVec& x, const Rat& p, const Rat& q) {
  if (p < 1 || q < 1) throw std::invalid_argument("exponents must be >= 1");
  auto group = [&] {
    if (x.scheme.kind != SchemeKind::mixed_sum)
      throw std::invalid_argument("expected a mixed_sum vector");
    std::map<SlotKey, std::vector<Rat>> slots;
    for (const auto& [ix, a] : x.entries)
      slots[{ix.v[0], static_cast<int>(ix.v[1]), ix.v[2]}].push_back(rat_abs(a));
    return slots;
  };
  auto slots = group();
  MixedNorm out;
  out.exact = (p == 1 || p == 2) && (q == 1 || q == 2);
  if (out.exact) {
    if (q == 2) {
      Rat total_sq = 0;
      for (const auto& [key, vals] : slots) {
        if (p == 2) {
          for (const auto& v : vals) total_sq += v * v;
        } else {
          Rat t = 0;
          for (const auto& v : vals) t += v;
          total_sq += t * t;
        }
      }
      out.value = sqrt_f50(total_sq);
      out.decimal = sqrt_decimal_str(total_sq, 12);
    } else if (p == 1) { // q == 1: plain l1
      Rat total = 0;
      for (const auto& [key, vals] : slots)
        for (const auto& v : vals) total += v;
      out.value = to_f50(total);
      out.decimal = decimal_str(total, 12);
    } else { // p == 2, q == 1: sum of slot l2 norms
      RadicalSum total;
      for (const auto& [key, vals] : slots) {
        Rat sq = 0;
        for (const auto& v : vals) sq += v * v;
        total = total + RadicalSum::of_sqrt(sq);
      }
      out.value = total.to_f50();
      out.decimal = total.decimal(12);
    }
    return out;
  }
  F50 fp = to_f50(p), fq = to_f50(q);
  F50 acc = 0;
  for (const auto& [key, vals] : slots) {
    F50 s = 0;
    for (const auto& v : vals) s += pow(to_f50(v), fp);
    acc += pow(pow(s, 1 / fp), fq);
  }
  out.value = pow(acc, 1 / fq);
  std::ostringstream os;
  os << std::fixed << std::setprecision(12) << out.value;
  out.decimal = os.str();
  return out;
}

} // namespace bsm
