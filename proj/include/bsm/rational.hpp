#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <optional>
#include <stdexcept>
#include <string>

namespace bsm {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using F50 = boost::multiprecision::cpp_bin_float_50;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }
inline int rat_sgn(const Rat& r) { return r < 0 ? -1 : (r > 0 ? 1 : 0); }

// Parses "p", "-p" or "p/q"; q > 0 enforced by normalization.
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int p(s.substr(0, slash));
    Int q(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rat(p, q);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
}

// Canonical form: "p" when integral, else "p/q" with q > 0 and gcd(p,q)=1.
inline std::string rat_str(const Rat& r) {
  Int n = rat_num(r), d = rat_den(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

// floor(sqrt(n)) for n >= 0.
inline Int isqrt(const Int& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative");
  return boost::multiprecision::sqrt(n);
}

inline bool is_square(const Int& n, Int* root = nullptr) {
  if (n < 0) return false;
  Int r = isqrt(n);
  if (root) *root = r;
  return r * r == n;
}

// Decimal expansion of r truncated toward zero at `digits` fractional digits.
inline std::string decimal_str(const Rat& r, unsigned digits = 12) {
  Int n = rat_num(r), d = rat_den(r);
  bool neg = n < 0;
  if (neg) n = -n;
  Int scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  Int whole = n / d;
  Int frac = ((n % d) * scale) / d;
  std::string f = frac.str();
  if (f.size() < digits) f = std::string(digits - f.size(), '0') + f;
  std::string out = (neg ? "-" : "") + whole.str();
  if (digits > 0) out += "." + f;
  return out;
}

// Decimal expansion of sqrt(r), r >= 0, truncated at `digits` fractional digits.
inline std::string sqrt_decimal_str(const Rat& r, unsigned digits = 12) {
  if (r < 0) throw std::invalid_argument("sqrt of negative");
  Int p = rat_num(r), q = rat_den(r);
  Int scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  // floor(sqrt(p/q) * 10^digits) = floor(sqrt(p*q*10^(2digits)) / q)
  Int s = isqrt(p * q * scale * scale);
  Int v = s / q;
  Int whole = v / scale, frac = v % scale;
  std::string f = frac.str();
  if (f.size() < digits) f = std::string(digits - f.size(), '0') + f;
  std::string out = whole.str();
  if (digits > 0) out += "." + f;
  return out;
}

inline F50 to_f50(const Rat& r) {
  return F50(rat_num(r)) / F50(rat_den(r));
}

inline F50 sqrt_f50(const Rat& r) { return sqrt(to_f50(r)); }

} // namespace bsm
