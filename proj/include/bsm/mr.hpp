#pragma once

#include "bsm/vector.hpp"

#include <map>
#include <optional>

namespace bsm {

// Weight rule: m_j = 2^(2^(j+1)) (so mu_j = m_j^2 = 2^(2^(j+2)) is a perfect
// square and the cross-weight double sum certifies below 1/2). Literal values
// exist only for small j; everything else stays symbolic.
struct MuSequence {
  static BigNat m(const BigNat& j);      // 2^(2^(j+1))
  static BigNat mu(const BigNat& j);     // 2^(2^(j+2))
  static bool literal_j(const BigNat& j, unsigned max_j = 20);
  static Rat inv_m(const BigNat& j);     // 1/m_j, literal j only
  // Exact upper bound for sum_{i<j} m_i/m_j (prefix exact + certified tails);
  // throws if the certificate fails to come in at or below 1/2.
  static Rat cross_weight_certificate(unsigned prefix = 4);
};

// Deterministic injection from special-sequence prefixes to fresh weight
/// indices: sigma(P) = max(#E over P) + 1 + insertion rank. Backed by an
// append-only JSON-lines log; replaying the log reproduces the assignment.
class SigmaRegistry {
public:
  SigmaRegistry() = default;
  explicit SigmaRegistry(std::string path); // loads existing log if present

  BigNat sigma(const std::string& prefix_key, const BigNat& max_card);
  std::optional<BigNat> peek(const std::string& prefix_key) const;
  size_t size() const { return order_.size(); }
  const std::string& path() const { return path_; }

private:
  void append_log(const std::string& key, const BigNat& value);

  std::string path_;
  std::map<std::string, BigNat> table_;
  std::vector<std::string> order_;
};

struct SpecialPair {
  BigNat j;        // weight index
  BigNat s1, s2;   // within-line starts (line 1 / line 2); both sets have mu(j) elements
  BigNat len() const { return MuSequence::mu(j); }
};

std::string special_prefix_key(const std::vector<SpecialPair>& prefix);

struct SpecialVectors {
  std::vector<SpecialPair> seq;
  std::vector<RleVec> x1, x2; // x^i_k, unit vectors along the sequence
  RleVec plus;                // sum of all x^1_k + x^2_k
  RleVec alternating;         // sum of (-1)^i x^i_k
};

// Builds the length-n special sequence through the registry, laying sets out
// successively (line-1 set, then line-2 set, then the next pair).
SpecialVectors build_special_vectors(int n, SigmaRegistry& reg);

struct MrBounds {
  Rat lower, upper;
  bool exact = false; // lower == upper == the supremum
  std::vector<std::pair<std::string, std::string>> candidates; // name -> value
};

// Certified sandwich for the norming supremum over W. Exact in the
// small-support regime (every global coordinate <= 511, where a weighted set
// cannot reach past the first line block); otherwise lower comes from
// explicitly evaluated functionals and upper from the aligned candidates plus
// the cross-weight tail allowance.
MrBounds mr_norm_bounds(const RleVec& x, const SigmaRegistry* reg = nullptr);
MrBounds mr_norm_bounds(const FinVec& x); // mr_line scheme, literal support

} // namespace bsm
