#include "bsm/vector.hpp"

#include <json.hpp>

#include <algorithm>

namespace bsm {

using nlohmann::json;

void index_validate(const IndexScheme& sch, const Index& ix) {
  switch (sch.kind) {
    case SchemeKind::natural:
    case SchemeKind::mr_line:
      if (ix.v[0] < 1) throw std::invalid_argument("index must be >= 1");
      return;
    case SchemeKind::interleaved:
      if (ix.v[0] < 1 || ix.v[0] > sch.l) throw std::invalid_argument("row out of range");
      if (ix.v[1] < 1) throw std::invalid_argument("position must be >= 1");
      return;
    case SchemeKind::mixed_sum:
      if (ix.v[0] < 1) throw std::invalid_argument("block must be >= 1");
      if (ix.v[1] != 0 && ix.v[1] != 1) throw std::invalid_argument("part must be X or Y");
      if (ix.v[2] < 1 || ix.v[2] > 2 * ix.v[0]) throw std::invalid_argument("slot out of range");
      if (ix.v[3] < 1) throw std::invalid_argument("inner index must be >= 1");
      return;
    case SchemeKind::dyadic:
      for (char c : ix.node)
        if (c != '0' && c != '1') throw std::invalid_argument("dyadic node must be binary");
      return;
  }
}

int index_cmp(const IndexScheme& sch, const Index& a, const Index& b) {
  auto c3 = [](long long x, long long y) { return x < y ? -1 : (x > y ? 1 : 0); };
  switch (sch.kind) {
    case SchemeKind::natural:
    case SchemeKind::mr_line:
      return c3(a.v[0], b.v[0]);
    case SchemeKind::interleaved:
      if (int c = c3(a.v[1], b.v[1])) return c;
      return c3(a.v[0], b.v[0]);
    case SchemeKind::mixed_sum:
      for (int k = 0; k < 4; ++k)
        if (int c = c3(a.v[k], b.v[k])) return c;
      return 0;
    case SchemeKind::dyadic:
      if (a.node.size() != b.node.size()) return a.node.size() < b.node.size() ? -1 : 1;
      return a.node.compare(b.node) < 0 ? -1 : (a.node == b.node ? 0 : 1);
  }
  return 0;
}

void fv_normalize(FinVec& v) {
  for (auto& [ix, c] : v.entries) index_validate(v.scheme, ix);
  std::sort(v.entries.begin(), v.entries.end(),
            [&](const auto& a, const auto& b) { return index_cmp(v.scheme, a.first, b.first) < 0; });
  std::vector<std::pair<Index, Rat>> out;
  for (auto& e : v.entries) {
    if (!out.empty() && index_cmp(v.scheme, out.back().first, e.first) == 0)
      out.back().second += e.second;
    else
      out.push_back(e);
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const auto& e) { return e.second == 0; }),
            out.end());
  v.entries = std::move(out);
}

FinVec fv_add(const FinVec& a, const FinVec& b) {
  if (a.scheme != b.scheme) throw std::invalid_argument("scheme mismatch in vector sum");
  FinVec r = a;
  r.entries.insert(r.entries.end(), b.entries.begin(), b.entries.end());
  fv_normalize(r);
  return r;
}

FinVec fv_scale(const FinVec& a, const Rat& c) {
  FinVec r = a;
  if (c == 0) {
    r.entries.clear();
    return r;
  }
  for (auto& e : r.entries) e.second *= c;
  return r;
}

FinVec fv_axpy(const Rat& c, const FinVec& x, const FinVec& y) {
  return fv_add(fv_scale(x, c), y);
}

Rat fv_coeff(const FinVec& v, const Index& ix) {
  for (const auto& e : v.entries)
    if (index_cmp(v.scheme, e.first, ix) == 0) return e.second;
  return Rat(0);
}

Rat fv_lp_sum(const FinVec& v, unsigned p) {
  Rat s = 0;
  for (const auto& e : v.entries) {
    Rat a = rat_abs(e.second), t = 1;
    for (unsigned i = 0; i < p; ++i) t *= a;
    s += t;
  }
  return s;
}

Rat fv_sup_abs(const FinVec& v) {
  Rat s = 0;
  for (const auto& e : v.entries) s = std::max(s, rat_abs(e.second));
  return s;
}

static bool run_key_lt(const RleRun& a, const RleRun& b) {
  if (a.line != b.line) return a.line < b.line;
  return a.start < b.start;
}

void rle_normalize(RleVec& v) {
  for (auto& r : v.runs) {
    if (r.line != 1 && r.line != 2) throw std::invalid_argument("run line must be 1 or 2");
    if (r.start < BigNat(Int(1))) throw std::invalid_argument("run start must be >= 1");
    if (r.len.is_zero()) throw std::invalid_argument("run length must be >= 1");
  }
  std::sort(v.runs.begin(), v.runs.end(), run_key_lt);
  v.runs.erase(std::remove_if(v.runs.begin(), v.runs.end(),
                              [](const RleRun& r) { return r.scalar == 0; }),
               v.runs.end());
  for (size_t i = 1; i < v.runs.size(); ++i) {
    if (v.runs[i].line == v.runs[i - 1].line &&
        v.runs[i].start <= v.runs[i - 1].end())
      throw std::invalid_argument("overlapping runs in one line");
  }
}

RleVec rle_scale(const RleVec& v, const Rat& c) {
  RleVec r = v;
  if (c == 0) {
    r.runs.clear();
    return r;
  }
  for (auto& run : r.runs) run.scalar *= c;
  return r;
}

static bool same_geometry(const RleRun& a, const RleRun& b) {
  if (a.line != b.line || a.start != b.start || a.len != b.len) return false;
  if (a.inv_weight.has_value() != b.inv_weight.has_value()) return false;
  return !a.inv_weight || *a.inv_weight == *b.inv_weight;
}

RleVec rle_add_aligned(const RleVec& a, const RleVec& b) {
  RleVec r = a;
  for (const auto& run : b.runs) {
    bool merged = false;
    for (auto& mine : r.runs) {
      if (same_geometry(mine, run)) {
        mine.scalar += run.scalar;
        merged = true;
        break;
      }
    }
    if (!merged) r.runs.push_back(run);
  }
  rle_normalize(r);
  return r;
}

RleVec rle_restrict(const RleVec& v, int line, const BigNat& lo, const BigNat& hi) {
  RleVec out;
  for (const auto& r : v.runs) {
    if (r.line != line) {
      out.runs.push_back(r);
      continue;
    }
    if (r.end() < lo || hi < r.start) continue; // dropped
    if (lo <= r.start && r.end() <= hi) {       // kept whole
      out.runs.push_back(r);
      continue;
    }
    const BigNat& s = BigNat::max(r.start, lo);
    const BigNat& e = BigNat::min(r.end(), hi);
    if (!s.is_literal() || !e.is_literal())
      throw std::invalid_argument("partial cut of a run with symbolic bounds");
    RleRun cut = r;
    cut.start = s;
    cut.len = BigNat(Int(e.literal_value() - s.literal_value() + 1));
    out.runs.push_back(cut);
  }
  rle_normalize(out);
  return out;
}

// m_j = 2^(2^(j+1)) for the shipped weight rule; literal only for small j.
static Rat literal_inv_m(const BigNat& j) {
  if (!j.is_literal() || j.literal_value() > 16)
    throw std::invalid_argument("weight index too large for literal evaluation");
  unsigned jj = static_cast<unsigned>(j.literal_value());
  Int m = Int(1) << (1u << (jj + 1));
  return Rat(1, m);
}

Rat rle_sum(const RleVec& v) {
  Rat s = 0;
  for (const auto& r : v.runs) {
    if (!r.len.is_literal())
      throw std::invalid_argument("rle_sum needs literal run lengths");
    Rat c = r.scalar;
    if (r.inv_weight) c *= literal_inv_m(*r.inv_weight);
    s += c * Rat(r.len.literal_value());
  }
  return s;
}

FinVec rle_to_finvec(const RleVec& v, unsigned long long max_coords) {
  FinVec out;
  out.scheme.kind = SchemeKind::mr_line;
  Int total = 0;
  for (const auto& r : v.runs) {
    if (!r.len.is_literal() || !r.start.is_literal())
      throw std::invalid_argument("cannot expand symbolic runs");
    total += r.len.literal_value();
    if (total > max_coords) throw std::invalid_argument("run expansion exceeds coordinate budget");
  }
  for (const auto& r : v.runs) {
    Rat c = r.scalar;
    if (r.inv_weight) c *= literal_inv_m(*r.inv_weight);
    long long s = static_cast<long long>(r.start.literal_value());
    long long L = static_cast<long long>(r.len.literal_value());
    for (long long p = s; p < s + L; ++p) {
      long long global = r.line == 1 ? 2 * p - 1 : 2 * p;
      out.entries.push_back({Index::nat(global), c});
    }
  }
  fv_normalize(out);
  return out;
}

// --- JSON documents ---

static std::string scheme_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::natural: return "natural";
    case SchemeKind::dyadic: return "dyadic";
    case SchemeKind::interleaved: return "interleaved";
    case SchemeKind::mixed_sum: return "mixed_sum";
    case SchemeKind::mr_line: return "mr_line";
  }
  return "?";
}

static SchemeKind scheme_from_name(const std::string& s) {
  if (s == "natural") return SchemeKind::natural;
  if (s == "dyadic") return SchemeKind::dyadic;
  if (s == "interleaved") return SchemeKind::interleaved;
  if (s == "mixed_sum") return SchemeKind::mixed_sum;
  if (s == "mr_line") return SchemeKind::mr_line;
  throw std::invalid_argument("unknown scheme: " + s);
}

static json index_to_json(const IndexScheme& sch, const Index& ix) {
  switch (sch.kind) {
    case SchemeKind::natural:
    case SchemeKind::mr_line:
      return ix.v[0];
    case SchemeKind::dyadic:
      return ix.node;
    case SchemeKind::interleaved:
      return json::array({ix.v[0], ix.v[1]});
    case SchemeKind::mixed_sum:
      return json::array({ix.v[0], ix.v[1] == 0 ? "X" : "Y", ix.v[2], ix.v[3]});
  }
  return nullptr;
}

static Index index_from_json(const IndexScheme& sch, const json& j) {
  Index ix;
  switch (sch.kind) {
    case SchemeKind::natural:
    case SchemeKind::mr_line:
      if (!j.is_number_integer()) throw std::invalid_argument("index must be an integer");
      ix.v[0] = j.get<long long>();
      break;
    case SchemeKind::dyadic:
      if (!j.is_string()) throw std::invalid_argument("dyadic index must be a string");
      ix.node = j.get<std::string>();
      break;
    case SchemeKind::interleaved:
      if (!j.is_array() || j.size() != 2) throw std::invalid_argument("interleaved index must be [i,n]");
      ix.v[0] = j[0].get<long long>();
      ix.v[1] = j[1].get<long long>();
      break;
    case SchemeKind::mixed_sum: {
      if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("mixed_sum index must be [n,part,j,m]");
      ix.v[0] = j[0].get<long long>();
      std::string part = j[1].get<std::string>();
      if (part != "X" && part != "Y") throw std::invalid_argument("part must be X or Y");
      ix.v[1] = part == "X" ? 0 : 1;
      ix.v[2] = j[2].get<long long>();
      ix.v[3] = j[3].get<long long>();
      break;
    }
  }
  index_validate(sch, ix);
  return ix;
}

std::string vec_write(const FinVec& v) {
  FinVec c = v;
  fv_normalize(c);
  json sch;
  sch["kind"] = scheme_name(c.scheme.kind);
  if (c.scheme.kind == SchemeKind::interleaved) sch["l"] = c.scheme.l;
  json entries = json::array();
  for (const auto& [ix, coeff] : c.entries)
    entries.push_back(json::array({index_to_json(c.scheme, ix), rat_str(coeff)}));
  json doc;
  doc["scheme"] = sch;
  doc["entries"] = entries;
  return doc.dump();
}

std::string vec_write(const RleVec& v) {
  RleVec c = v;
  rle_normalize(c);
  json runs = json::array();
  for (const auto& r : c.runs) {
    json row = json::array({r.line, r.start.str(), r.len.str(), rat_str(r.scalar)});
    if (r.inv_weight) row.push_back("invm:" + r.inv_weight->str());
    runs.push_back(row);
  }
  json doc;
  doc["scheme"] = json{{"kind", "mr_line"}};
  doc["runs"] = runs;
  return doc.dump();
}

AnyVec vec_read(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("bad vector document: ") + e.what());
  }
  if (!doc.contains("scheme")) throw std::invalid_argument("vector document missing scheme");
  if (!doc["scheme"].contains("kind"))
    throw std::invalid_argument("vector scheme missing kind");
  IndexScheme sch;
  sch.kind = scheme_from_name(doc["scheme"]["kind"].get<std::string>());
  if (sch.kind == SchemeKind::interleaved) {
    if (!doc["scheme"].contains("l"))
      throw std::invalid_argument("interleaved scheme needs l");
    sch.l = doc["scheme"]["l"].get<int>();
    if (sch.l < 1) throw std::invalid_argument("interleaved l must be >= 1");
  }
  if (doc.contains("runs")) {
    if (sch.kind != SchemeKind::mr_line)
      throw std::invalid_argument("runs are only valid under the mr_line scheme");
    RleVec v;
    for (const auto& row : doc["runs"]) {
      if (!row.is_array() || row.size() < 4 || row.size() > 5)
        throw std::invalid_argument("run row must be [line,start,len,coeff(,invm)]");
      RleRun r;
      r.line = row[0].get<int>();
      r.start = BigNat::parse(row[1].get<std::string>());
      r.len = BigNat::parse(row[2].get<std::string>());
      r.scalar = parse_rat(row[3].get<std::string>());
      if (row.size() == 5) {
        std::string w = row[4].get<std::string>();
        if (w.rfind("invm:", 0) != 0) throw std::invalid_argument("fifth run field must be invm:<j>");
        r.inv_weight = BigNat::parse(w.substr(5));
      }
      v.runs.push_back(std::move(r));
    }
    rle_normalize(v);
    return v;
  }
  if (!doc.contains("entries")) throw std::invalid_argument("vector document missing entries");
  FinVec v;
  v.scheme = sch;
  for (const auto& row : doc["entries"]) {
    if (!row.is_array() || row.size() != 2)
      throw std::invalid_argument("entry must be [index, coeff]");
    v.entries.push_back({index_from_json(sch, row[0]), parse_rat(row[1].get<std::string>())});
  }
  fv_normalize(v);
  return v;
}

} // namespace bsm
