#pragma once

#include "bsm/vector.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bsm {

// l rows of length k; row i lists the increasing elements of the i-th set.
struct PlegmaFamily {
  std::vector<std::vector<long long>> rows;

  int l() const { return static_cast<int>(rows.size()); }
  int k() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
};

struct PlegmaCheck {
  bool ok = true;
  std::string violation; // empty when ok
};

// Conditions: every entry of column j precedes every entry of column j+1,
// and within a column entries are nondecreasing down the rows (strictly
// increasing for the strict variant). Rows themselves must strictly increase.
PlegmaCheck plegma_validate(const PlegmaFamily& fam, bool strict);

// All families with entries drawn from `ground` (sorted, distinct, >= 1),
// in lexicographic order of the concatenated rows.
std::vector<PlegmaFamily> plegma_enumerate(const std::vector<long long>& ground,
                                           int l, int k, bool strict);

// Re-places an interleaved vector along the family: e^i_n -> e^i_{s_i(n)}.
// Support positions must not exceed the family width.
FinVec plegma_shift(const FinVec& x, const PlegmaFamily& fam);

// Indices sorted by (n, i).
std::vector<Index> natural_order(const IndexScheme& sch, std::vector<Index> ixs);

struct Coloring {
  std::string name;
  std::function<int(const PlegmaFamily&)> fn;
};

Coloring builtin_coloring(const std::string& name); // const | parity | gt10

enum class RamseyStatus { found, exhausted, budget_exhausted };

struct RamseyResult {
  RamseyStatus status = RamseyStatus::exhausted;
  std::vector<long long> subset; // found: the monochromatic L
  int color = 0;
  unsigned long long families_checked = 0;
  unsigned long long subsets_checked = 0;
};

// Walks size-`target_len` subsets of `ground` in colexicographic order and
// returns the first whose strict plegma families are monochromatic. The walk
// is exhaustive, so status `exhausted` certifies that no such subset exists
// within the ground set; `budget_exhausted` (family-evaluation budget) does
// not.
RamseyResult ramsey_search(const Coloring& col, const std::vector<long long>& ground,
                           int l, int k, int target_len,
                           unsigned long long family_budget = 50'000'000);

} // namespace bsm
