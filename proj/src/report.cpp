#include "bsm/report.hpp"

#include "json.hpp"

#include <sstream>
#include <stdexcept>

namespace bsm {

long long Rng::uniform(long long lo, long long hi) {
  if (hi < lo) throw std::invalid_argument("uniform: empty range");
  unsigned long long span = static_cast<unsigned long long>(hi - lo) + 1;
  return lo + static_cast<long long>(eng() % span);
}

Rat Rng::rational(long long abs_max, long long den_max) {
  long long num = uniform(-abs_max, abs_max);
  long long den = uniform(1, den_max);
  return Rat(num, den);
}

std::vector<Rat> Rng::simplex_point(int n, long long grid) {
  if (n <= 0) throw std::invalid_argument("simplex_point: empty");
  std::vector<long long> w(n);
  long long total = 0;
  while (total == 0) {
    total = 0;
    for (auto& v : w) {
      v = uniform(0, grid);
      total += v;
    }
  }
  std::vector<Rat> lam(n);
  for (int i = 0; i < n; ++i) lam[i] = Rat(w[i], total);
  return lam;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::ostringstream os;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      os << f;
    } else {
      os << '"';
      for (char c : f) {
        if (c == '"') os << "\"\"";
        else os << c;
      }
      os << '"';
    }
  }
  os << '\n';
  return os.str();
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["parameters"] = nlohmann::json::parse(m.parameters.empty() ? "{}" : m.parameters);
  j["seed"] = m.seed;
  j["registry_hash"] = m.registry_hash.empty() ? "-" : m.registry_hash;
  j["tool_version"] = m.tool_version;
  j["result_digest"] = m.result_digest;
  return j.dump(2) + "\n";
}

} // namespace bsm
