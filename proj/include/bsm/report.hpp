#pragma once

#include "bsm/rational.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bsm {

inline constexpr const char* kToolVersion = "bsmlab 0.1.0";

// Deterministic helpers on top of one shared engine. Draws are hand-rolled
// modular reductions so identical seeds give identical streams on every
// platform; ranges here are tiny, so the modulo bias is irrelevant.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(unsigned long long seed) : eng(seed) {}

  unsigned long long raw() { return eng(); }
  long long uniform(long long lo, long long hi); // inclusive bounds
  Rat rational(long long abs_max, long long den_max);
  // Exact barycentric point: integer weights on a grid, normalized to sum 1.
  std::vector<Rat> simplex_point(int n, long long grid = 1000);
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

// Minimal-quoting CSV: fields holding separators, quotes or newlines are
// quoted and embedded quotes doubled.
std::string csv_row(const std::vector<std::string>& fields);

struct RunManifest {
  std::string command;
  std::string parameters;    // canonical JSON text of the effective options
  unsigned long long seed = 0;
  std::string registry_hash; // digest of the weight registry file, "-" if unused
  std::string tool_version = kToolVersion;
  std::string result_digest; // digest of the report bytes
};
std::string manifest_json(const RunManifest& m);

} // namespace bsm
