#pragma once

#include "bsm/rational.hpp"

#include <memory>
#include <vector>

namespace bsm {

// Nonnegative integer in canonical power-sum form
//
//   base + sum_i coeff_i * 2^(exp_i)
//
// where the exponents are themselves BigNats (towers bottom out in literals).
// Values small enough to hold in a cpp_int stay literal (terms empty).
// Canonical invariants, enforced on construction:
//   * coeff_i > 0, bit length <= 64; |base| bit length <= 96
//   * exps strictly decreasing with gaps >= 128, smallest exp >= 128
// The gap invariant makes lexicographic comparison over merged exponent
// lists exact: a unit coefficient difference at one exponent dominates every
// admissible tail below it.
class BigNat {
public:
  struct Term {
    Int coeff;
    std::shared_ptr<const BigNat> exp;
  };

  BigNat() : base_(0) {}
  explicit BigNat(Int v) : base_(std::move(v)) {
    if (base_ < 0) throw std::invalid_argument("BigNat literal must be >= 0");
  }
  explicit BigNat(unsigned long long v) : base_(v) {}

  static BigNat literal(Int v) { return BigNat(std::move(v)); }

  // 2^e; literal when e is a small literal, symbolic single-term otherwise.
  static BigNat pow2(const BigNat& e) {
    if (e.is_literal() && e.base_ <= kLiteralPow2Bits) {
      Int one = 1;
      return BigNat(one << static_cast<unsigned>(e.base_));
    }
    BigNat r;
    r.terms_.push_back({Int(1), std::make_shared<const BigNat>(e)});
    r.validate();
    return r;
  }

  bool is_literal() const { return terms_.empty(); }
  const Int& literal_value() const {
    if (!is_literal()) throw std::logic_error("BigNat not literal");
    return base_;
  }
  bool is_zero() const { return terms_.empty() && base_ == 0; }

  static int cmp(const BigNat& a, const BigNat& b) {
    size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (i == a.terms_.size()) return -1;
      if (j == b.terms_.size()) return 1;
      int ec = cmp(*a.terms_[i].exp, *b.terms_[j].exp);
      if (ec > 0) return 1;   // a has a strictly larger power
      if (ec < 0) return -1;
      if (a.terms_[i].coeff != b.terms_[j].coeff)
        return a.terms_[i].coeff < b.terms_[j].coeff ? -1 : 1;
      ++i, ++j;
    }
    if (a.base_ != b.base_) return a.base_ < b.base_ ? -1 : 1;
    return 0;
  }

  friend bool operator==(const BigNat& a, const BigNat& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const BigNat& a, const BigNat& b) { return cmp(a, b) != 0; }
  friend bool operator<(const BigNat& a, const BigNat& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const BigNat& a, const BigNat& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const BigNat& a, const BigNat& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const BigNat& a, const BigNat& b) { return cmp(a, b) >= 0; }

  friend BigNat operator+(const BigNat& a, const BigNat& b) {
    BigNat r;
    r.base_ = a.base_ + b.base_;
    size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() ||
          (i < a.terms_.size() && cmp(*a.terms_[i].exp, *b.terms_[j].exp) > 0)) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || cmp(*a.terms_[i].exp, *b.terms_[j].exp) < 0) {
        r.terms_.push_back(b.terms_[j++]);
      } else {
        r.terms_.push_back({a.terms_[i].coeff + b.terms_[j].coeff, a.terms_[i].exp});
        ++i, ++j;
      }
    }
    r.validate();
    return r;
  }

  // Signed literal offset; the result must stay >= 0 (checked when literal,
  // trusted under the gap invariant otherwise).
  friend BigNat operator+(const BigNat& a, const Int& d) {
    BigNat r = a;
    r.base_ += d;
    if (r.terms_.empty() && r.base_ < 0)
      throw std::invalid_argument("BigNat underflow");
    r.validate();
    return r;
  }
  friend BigNat operator-(const BigNat& a, const Int& d) { return a + Int(-d); }

  friend BigNat operator*(const BigNat& a, const Int& c) {
    if (c < 0) throw std::invalid_argument("BigNat scale must be >= 0");
    if (c == 0) return BigNat();
    BigNat r = a;
    r.base_ *= c;
    for (auto& t : r.terms_) t.coeff *= c;
    r.validate();
    return r;
  }

  static const BigNat& max(const BigNat& a, const BigNat& b) {
    return cmp(a, b) >= 0 ? a : b;
  }
  static const BigNat& min(const BigNat& a, const BigNat& b) {
    return cmp(a, b) <= 0 ? a : b;
  }

  // Canonical text form, e.g. "2^(2^259)+257" or "3*2^(2^(2^259)+2)+1".
  std::string str() const {
    if (terms_.empty()) return literal_str(base_);
    std::string out;
    for (size_t i = 0; i < terms_.size(); ++i) {
      if (i) out += "+";
      if (terms_[i].coeff != 1) out += terms_[i].coeff.str() + "*";
      std::string es = terms_[i].exp->str();
      // parenthesize whenever the exponent itself carries a power
      if (es.find('^') == std::string::npos)
        out += "2^" + es;
      else
        out += "2^(" + es + ")";
    }
    if (base_ > 0) out += "+" + base_.str();
    if (base_ < 0) out += "-" + Int(-base_).str();
    return out;
  }

  static BigNat parse(const std::string& s) {
    size_t pos = 0;
    BigNat r = parse_expr(s, pos);
    if (pos != s.size()) throw std::invalid_argument("trailing input in BigNat: " + s);
    return r;
  }

private:
  static constexpr unsigned kLiteralPow2Bits = 1u << 20; // 1 Mib literal ceiling

  // Literal powers of two past the casual range render in power form; the
  // cap keeps the rendered string parseable back into a literal.
  static std::string literal_str(const Int& v) {
    namespace mp = boost::multiprecision;
    if (v > 0 && mp::lsb(v) == mp::msb(v)) {
      unsigned k = mp::msb(v);
      if (k > 20 && k <= kLiteralPow2Bits) return "2^" + std::to_string(k);
    }
    return v.str();
  }

  void validate() const {
    const BigNat* prev = nullptr;
    for (const auto& t : terms_) {
      if (t.coeff <= 0) throw std::logic_error("BigNat: nonpositive coeff");
      if (boost::multiprecision::msb(t.coeff) >= 64)
        throw std::logic_error("BigNat: coeff too wide for canonical form");
      if (t.exp->is_literal() && t.exp->base_ < 128)
        throw std::logic_error("BigNat: symbolic term with tiny exponent");
      if (prev) {
        BigNat gap = *t.exp + Int(128);
        if (cmp(*prev, gap) < 0)
          throw std::logic_error("BigNat: exponent gap below canonical floor");
      }
      prev = t.exp.get();
    }
    // The base bound only matters as a tail under symbolic terms; pure
    // literals may be as wide as cpp_int allows.
    if (!terms_.empty() && base_ != 0 &&
        boost::multiprecision::msb(Int(boost::multiprecision::abs(base_))) >= 96)
      throw std::logic_error("BigNat: base too wide for canonical form");
  }

  static BigNat parse_expr(const std::string& s, size_t& pos) {
    BigNat acc = parse_part(s, pos);
    while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      char op = s[pos++];
      BigNat p = parse_part(s, pos);
      if (op == '+') {
        acc = acc + p;
      } else {
        if (!p.is_literal()) throw std::invalid_argument("BigNat: cannot subtract tower");
        acc = acc + Int(-p.base_);
      }
    }
    return acc;
  }

  static BigNat parse_part(const std::string& s, size_t& pos) {
    if (pos + 1 < s.size() && s[pos] == '2' && s[pos + 1] == '^')
      return parse_pow(s, pos);
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw std::invalid_argument("BigNat: expected integer at " + s.substr(start));
    Int c(s.substr(start, pos - start));
    if (pos < s.size() && s[pos] == '*') {
      ++pos;
      BigNat p = parse_pow(s, pos);
      return p * c;
    }
    return BigNat(c);
  }

  static BigNat parse_pow(const std::string& s, size_t& pos) {
    if (pos + 1 >= s.size() || s[pos] != '2' || s[pos + 1] != '^')
      throw std::invalid_argument("BigNat: expected 2^ at " + s.substr(pos));
    pos += 2;
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      BigNat e = parse_expr(s, pos);
      if (pos >= s.size() || s[pos] != ')')
        throw std::invalid_argument("BigNat: missing )");
      ++pos;
      return pow2(e);
    }
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw std::invalid_argument("BigNat: expected exponent");
    return pow2(BigNat(Int(s.substr(start, pos - start))));
  }

  Int base_;
  std::vector<Term> terms_;
};

} // namespace bsm
