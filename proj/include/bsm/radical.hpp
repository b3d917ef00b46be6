#pragma once

#include "bsm/rational.hpp"

#include <algorithm>
#include <vector>

namespace bsm {

// Exact value of the form  r + sum_i c_i * sqrt(d_i)  with d_i > 1 pairwise
// distinct integers with no square factor below the trial-division bound and
// c_i nonzero rationals. Closed under +, scalar *, and product; supports
// exact sign comparison (distinct square-free surds are linearly independent
// over Q, so a nonzero value is bounded away from zero and precision
// escalation terminates).
struct RadicalSum {
  Rat r;
  std::vector<std::pair<Int, Rat>> terms; // sorted by d

  static RadicalSum of_rat(const Rat& q) {
    RadicalSum s;
    s.r = q;
    return s;
  }

  // sqrt(q) for q >= 0: sqrt(p/den) = sqrt(p*den)/den, square part extracted.
  static RadicalSum of_sqrt(const Rat& q) {
    if (q < 0) throw std::invalid_argument("sqrt of negative rational");
    RadicalSum s;
    if (q == 0) return s;
    Int p = rat_num(q), den = rat_den(q);
    auto [root, d] = square_split(p * den);
    Rat coeff = Rat(root, den);
    if (d == 1)
      s.r = coeff;
    else
      s.terms.push_back({d, coeff});
    return s;
  }

  bool is_rational() const { return terms.empty(); }

  friend RadicalSum operator+(const RadicalSum& a, const RadicalSum& b) {
    RadicalSum s;
    s.r = a.r + b.r;
    s.terms = a.terms;
    for (const auto& t : b.terms) s.push_term(t.first, t.second);
    s.sort_terms();
    return s;
  }

  friend RadicalSum operator*(const RadicalSum& a, const Rat& c) {
    RadicalSum s;
    if (c == 0) return s;
    s.r = a.r * c;
    s.terms = a.terms;
    for (auto& t : s.terms) t.second *= c;
    return s;
  }

  friend RadicalSum operator*(const RadicalSum& a, const RadicalSum& b) {
    RadicalSum s;
    s.r = a.r * b.r;
    for (const auto& t : b.terms) s.push_term(t.first, a.r * t.second);
    for (const auto& t : a.terms) s.push_term(t.first, b.r * t.second);
    for (const auto& ta : a.terms)
      for (const auto& tb : b.terms) {
        auto [root, d] = square_split(ta.first * tb.first);
        Rat c = ta.second * tb.second * Rat(root);
        if (d == 1)
          s.r += c;
        else
          s.push_term(d, c);
      }
    s.sort_terms();
    return s;
  }

  friend RadicalSum operator-(const RadicalSum& a, const RadicalSum& b) {
    return a + (b * Rat(-1));
  }

  int sign() const {
    if (terms.empty()) return rat_sgn(r);
    if (terms.size() == 1 && r == 0) return rat_sgn(terms[0].second);
    if (terms.size() == 1) {
      // r + c*sqrt(d): compare r^2 against c^2 d on the side sign logic allows
      const Rat& c = terms[0].second;
      Rat lhs = r * r, rhs = c * c * Rat(terms[0].first);
      if (r > 0 && c > 0) return 1;
      if (r < 0 && c < 0) return -1;
      if (lhs == rhs) return 0;
      bool rat_dominates = lhs > rhs;
      return rat_dominates ? rat_sgn(r) : rat_sgn(c);
    }
    // Several independent surds: refine precision until the interval clears 0.
    for (unsigned digits = 60; digits <= 960; digits *= 2) {
      auto [lo, hi] = interval(digits);
      if (lo > 0) return 1;
      if (hi < 0) return -1;
      if (lo == 0 && hi == 0) return 0;
    }
    throw std::runtime_error("radical sign: precision escalation exhausted");
  }

  static int cmp(const RadicalSum& a, const RadicalSum& b) { return (a - b).sign(); }

  friend bool operator==(const RadicalSum& a, const RadicalSum& b) {
    return a.r == b.r && a.terms == b.terms;
  }

  F50 to_f50() const {
    F50 v = bsm::to_f50(r);
    for (const auto& t : terms) v += bsm::to_f50(t.second) * sqrt(F50(t.first));
    return v;
  }

  // Truncated decimal with guard digits; exactness lives in the representation.
  std::string decimal(unsigned digits = 12) const {
    auto [lo, hi] = interval(digits + 20);
    Rat mid = (lo + hi) / 2;
    return decimal_str(mid, digits);
  }

  // n = root^2 * d with d free of square factors below the trial bound.
  static std::pair<Int, Int> square_split(Int n) {
    if (n < 0) throw std::invalid_argument("square_split of negative");
    Int root = 1, d = 1;
    for (Int p = 2; p * p * p <= n && p < 100000; p += (p == 2 ? 1 : 2)) {
      while (n % (p * p) == 0) {
        n /= p * p;
        root *= p;
      }
      while (n % p == 0) {
        n /= p;
        d *= p;
      }
    }
    Int rem_root;
    if (is_square(n, &rem_root)) {
      root *= rem_root;
    } else {
      d *= n;
    }
    return {root, d};
  }

private:
  void push_term(const Int& d, const Rat& c) {
    if (c == 0) return;
    for (auto& t : terms) {
      if (t.first == d) {
        t.second += c;
        return;
      }
    }
    terms.push_back({d, c});
  }

  void sort_terms() {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const auto& t) { return t.second == 0; }),
                terms.end());
  }

  // Rational enclosure with ~`digits` decimal digits of precision.
  std::pair<Rat, Rat> interval(unsigned digits) const {
    Int scale = 1;
    for (unsigned i = 0; i < digits; ++i) scale *= 10;
    Rat lo = r, hi = r;
    for (const auto& [d, c] : terms) {
      // floor/ceil of sqrt(d)*scale
      Int s = isqrt(d * scale * scale);
      Rat slo(s, scale), shi(s + 1, scale);
      if (c > 0) {
        lo += c * slo;
        hi += c * shi;
      } else {
        lo += c * shi;
        hi += c * slo;
      }
    }
    return {lo, hi};
  }
};

} // namespace bsm
