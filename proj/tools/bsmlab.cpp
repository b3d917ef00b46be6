// bsmlab: single-binary front end over the library. Subcommands evaluate
// norms, enumerate and transform plegma families, run the colexicographic
// Ramsey walk, estimate joint-spreading tables, and verify the approximation
// counterexamples. Every run prints a manifest whose digest is a pure
// function of argv + seed + registry, which is the reproducibility contract.
#include "bsm/asymptotics.hpp"
#include "bsm/calx.hpp"
#include "bsm/james.hpp"
#include "bsm/jtree.hpp"
#include "bsm/mr.hpp"
#include "bsm/plegma.hpp"
#include "bsm/report.hpp"
#include "bsm/uals.hpp"
#include "bsm/vector.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

using nlohmann::json;
using namespace bsm;

namespace {

std::string f50_str(const F50& v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(12) << v;
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// "A..B" (inclusive) or a comma-separated list.
std::vector<long long> parse_ground(const std::string& s) {
  std::vector<long long> out;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    long long a = std::stoll(s.substr(0, dots));
    long long b = std::stoll(s.substr(dots + 2));
    if (a < 1 || b < a) throw std::invalid_argument("ground range must be 1 <= A <= B");
    for (long long v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoll(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty ground set");
  return out;
}

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a rational p or p/q, got: " + s);
  }
}

std::vector<Rat> parse_rat_list(const std::string& s) {
  std::vector<Rat> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(parse_rat(tok));
  }
  return out;
}

// Rows separated by ';', entries by ','. Matches the printed form.
PlegmaFamily parse_family(const std::string& s) {
  PlegmaFamily fam;
  std::istringstream rows(s);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::vector<long long> r;
    std::istringstream in(row);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      if (tok.empty()) continue;
      r.push_back(std::stoll(tok));
    }
    if (!r.empty()) fam.rows.push_back(std::move(r));
  }
  if (fam.rows.empty()) throw std::invalid_argument("empty family literal");
  return fam;
}

std::string family_str(const PlegmaFamily& fam) {
  std::ostringstream os;
  for (size_t i = 0; i < fam.rows.size(); ++i) {
    if (i) os << ';';
    for (size_t j = 0; j < fam.rows[i].size(); ++j) {
      if (j) os << ',';
      os << fam.rows[i][j];
    }
  }
  return os.str();
}

json vec_doc(const FinVec& v) { return json::parse(vec_write(v)); }
json vec_doc(const RleVec& v) { return json::parse(vec_write(v)); }

// Options shared by every subcommand plus the assembled manifest inputs.
struct RunCtx {
  std::string out_dir;
  unsigned long long seed = 1;
  int jobs = 1;
  std::string command;
  json params = json::object();
  std::string registry_hash = "-";
};

void finish_run(const RunCtx& ctx, const json& report, const std::string& csv) {
  std::string bytes = report.dump(2);
  bytes.push_back('\n');
  RunManifest m;
  m.command = ctx.command;
  m.parameters = ctx.params.dump();
  m.seed = ctx.seed;
  m.registry_hash = ctx.registry_hash;
  m.result_digest = digest_hex(bytes);
  if (!ctx.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(ctx.out_dir);
    std::string base = ctx.command;
    for (char& c : base)
      if (c == ' ' || c == '-') c = '_';
    std::ofstream(fs::path(ctx.out_dir) / (base + "_report.json")) << bytes;
    if (!csv.empty()) std::ofstream(fs::path(ctx.out_dir) / (base + "_table.csv")) << csv;
    std::ofstream(fs::path(ctx.out_dir) / "manifest.json") << manifest_json(m) << "\n";
  }
  std::cout << "report digest: " << m.result_digest << "\n";
  std::cout << "manifest: " << manifest_json(m) << "\n";
}

FinVec require_finvec(const AnyVec& av, const std::string& what) {
  if (const FinVec* fv = std::get_if<FinVec>(&av)) return *fv;
  throw std::invalid_argument(what + " needs an entry-list vector document, not a run-length one");
}

// ---------------------------------------------------------------- norm ----

int run_norm(RunCtx& ctx, const std::string& space, const std::string& vec_path,
             const std::string& p_s, const std::string& q_s, bool witness,
             const std::string& registry_path) {
  std::string text = read_file(vec_path);
  AnyVec av = vec_read(text);

  json rep;
  rep["schema"] = "bsmlab.norm/1";
  rep["space"] = space;
  if (const FinVec* fv = std::get_if<FinVec>(&av))
    rep["input"] = vec_doc(*fv);
  else
    rep["input"] = vec_doc(std::get<RleVec>(av));

  if (space == "james") {
    FinVec x = require_finvec(av, "james norm");
    if (x.scheme.kind == SchemeKind::interleaved) x = james_materialize(x);
    JamesNorm jn = james_norm_sq(x);
    std::cout << "james norm squared: " << rat_str(jn.sq) << " = " << decimal_str(jn.sq)
              << "\n";
    std::cout << "norm: " << sqrt_decimal_str(jn.sq) << "\n";
    rep["norm_sq"] = rat_str(jn.sq);
    rep["norm_sq_decimal"] = decimal_str(jn.sq);
    rep["norm_decimal"] = sqrt_decimal_str(jn.sq);
    rep["exact"] = true;
    if (witness) {
      json w = json::array();
      for (size_t i = 0; i < jn.intervals.size(); ++i) {
        w.push_back({{"lo", jn.intervals[i].first},
                     {"hi", jn.intervals[i].second},
                     {"sum", rat_str(jn.sums[i])}});
        std::cout << "interval [" << jn.intervals[i].first << ", " << jn.intervals[i].second
                  << "] sum " << rat_str(jn.sums[i]) << "\n";
      }
      rep["witness"] = w;
    }
  } else if (space == "jt") {
    FinVec x = require_finvec(av, "jt norm");
    JtNorm jn = jt_norm_sq(x);
    std::cout << "jt norm squared: " << rat_str(jn.sq) << " = " << decimal_str(jn.sq) << "\n";
    std::cout << "norm: " << sqrt_decimal_str(jn.sq) << "\n";
    rep["norm_sq"] = rat_str(jn.sq);
    rep["norm_sq_decimal"] = decimal_str(jn.sq);
    rep["norm_decimal"] = sqrt_decimal_str(jn.sq);
    rep["exact"] = true;
    if (witness) {
      json w = json::array();
      for (size_t i = 0; i < jn.segments.size(); ++i) {
        w.push_back({{"from", jn.segments[i].first},
                     {"to", jn.segments[i].second},
                     {"sum", rat_str(jn.sums[i])}});
        std::cout << "segment [" << jn.segments[i].first << " .. " << jn.segments[i].second
                  << "] sum " << rat_str(jn.sums[i]) << "\n";
      }
      rep["witness"] = w;
    }
  } else if (space == "mr") {
    std::unique_ptr<SigmaRegistry> reg;
    if (!registry_path.empty()) {
      reg = std::make_unique<SigmaRegistry>(registry_path);
      std::ifstream in(registry_path, std::ios::binary);
      if (in) {
        std::ostringstream os;
        os << in.rdbuf();
        ctx.registry_hash = digest_hex(os.str());
      }
    }
    MrBounds mb;
    if (const FinVec* fv = std::get_if<FinVec>(&av))
      mb = mr_norm_bounds(*fv);
    else
      mb = mr_norm_bounds(std::get<RleVec>(av), reg.get());
    std::cout << "mr norm lower: " << rat_str(mb.lower) << " = " << decimal_str(mb.lower)
              << "\n";
    std::cout << "mr norm upper: " << rat_str(mb.upper) << " = " << decimal_str(mb.upper)
              << "\n";
    std::cout << "exact: " << (mb.exact ? "yes" : "no") << "\n";
    rep["lower"] = rat_str(mb.lower);
    rep["lower_decimal"] = decimal_str(mb.lower);
    rep["upper"] = rat_str(mb.upper);
    rep["upper_decimal"] = decimal_str(mb.upper);
    rep["exact"] = mb.exact;
    if (witness) {
      json w = json::array();
      for (const auto& [name, val] : mb.candidates) {
        w.push_back({{"functional", name}, {"value", val}});
        std::cout << "candidate " << name << " -> " << val << "\n";
      }
      rep["witness"] = w;
    }
  } else if (space == "calx") {
    FinVec x = require_finvec(av, "calx norm");
    CalxNormSq cn = calx_norm_sq(x);
    std::ostringstream ex;
    ex << rat_str(cn.value.r);
    for (const auto& [d, c] : cn.value.terms) ex << " + (" << rat_str(c) << ")*sqrt(" << d << ")";
    std::cout << "calx norm squared: " << cn.decimal << " = " << ex.str() << "\n";
    rep["norm_sq_decimal"] = cn.decimal;
    rep["norm_sq_rational_part"] = rat_str(cn.value.r);
    json terms = json::array();
    for (const auto& [d, c] : cn.value.terms)
      terms.push_back({{"radicand", d.str()}, {"coeff", rat_str(c)}});
    rep["norm_sq_radical_terms"] = terms;
    rep["exact"] = true;
  } else if (space == "mixed") {
    FinVec x = require_finvec(av, "mixed norm");
    Rat p = parse_rat(p_s), q = parse_rat(q_s);
    MixedNorm mn = mixed_pq_norm(x, p, q);
    std::cout << "mixed (" << rat_str(p) << ", " << rat_str(q) << ") norm: " << mn.decimal
              << "\n";
    std::cout << "exact: " << (mn.exact ? "yes" : "no") << "\n";
    rep["p"] = rat_str(p);
    rep["q"] = rat_str(q);
    rep["norm_decimal"] = mn.decimal;
    rep["exact"] = mn.exact;
  } else {
    throw std::invalid_argument("unknown space: " + space);
  }
  finish_run(ctx, rep, "");
  return 0;
}

// -------------------------------------------------------------- plegma ----

int run_plegma_enum(RunCtx& ctx, const std::string& ground_s, int l, int k, bool strict) {
  auto ground = parse_ground(ground_s);
  auto fams = plegma_enumerate(ground, l, k, strict);
  json rep;
  rep["schema"] = "bsmlab.plegma.enum/1";
  rep["ground"] = ground_s;
  rep["l"] = l;
  rep["k"] = k;
  rep["strict"] = strict;
  rep["count"] = fams.size();
  json list = json::array();
  std::ostringstream csv;
  csv << csv_row({"family"}) << "\n";
  for (const auto& fam : fams) {
    std::string s = family_str(fam);
    std::cout << s << "\n";
    list.push_back(s);
    csv << csv_row({s}) << "\n";
  }
  rep["families"] = list;
  std::cout << "count: " << fams.size() << "\n";
  finish_run(ctx, rep, csv.str());
  return 0;
}

int run_plegma_check(RunCtx& ctx, const std::string& family_s, bool strict) {
  PlegmaFamily fam = parse_family(family_s);
  PlegmaCheck pc = plegma_validate(fam, strict);
  json rep;
  rep["schema"] = "bsmlab.plegma.check/1";
  rep["family"] = family_str(fam);
  rep["strict"] = strict;
  rep["ok"] = pc.ok;
  rep["violation"] = pc.violation;
  if (pc.ok)
    std::cout << "ok\n";
  else
    std::cout << "violation: " << pc.violation << "\n";
  finish_run(ctx, rep, "");
  return pc.ok ? 0 : 1;
}

int run_plegma_shift(RunCtx& ctx, const std::string& vec_path, const std::string& family_s) {
  FinVec x = require_finvec(vec_read(read_file(vec_path)), "plegma shift");
  PlegmaFamily fam = parse_family(family_s);
  FinVec y = plegma_shift(x, fam);
  json rep;
  rep["schema"] = "bsmlab.plegma.shift/1";
  rep["family"] = family_str(fam);
  rep["input"] = vec_doc(x);
  rep["output"] = vec_doc(y);
  std::cout << vec_write(y) << "\n";
  finish_run(ctx, rep, "");
  return 0;
}

int run_ramsey(RunCtx& ctx, const std::string& color, const std::string& ground_s, int l, int k,
               int len, unsigned long long budget) {
  Coloring col = builtin_coloring(color);
  auto ground = parse_ground(ground_s);
  RamseyResult rr = ramsey_search(col, ground, l, k, len, budget);
  const char* status = rr.status == RamseyStatus::found        ? "found"
                       : rr.status == RamseyStatus::exhausted ? "exhausted"
                                                              : "budget-exhausted";
  json rep;
  rep["schema"] = "bsmlab.ramsey/1";
  rep["color"] = color;
  rep["ground"] = ground_s;
  rep["l"] = l;
  rep["k"] = k;
  rep["len"] = len;
  rep["status"] = status;
  rep["subset"] = rr.subset;
  rep["monochrome_color"] = rr.color;
  rep["families_checked"] = rr.families_checked;
  rep["subsets_checked"] = rr.subsets_checked;
  std::cout << "status: " << status << "\n";
  if (rr.status == RamseyStatus::found) {
    std::cout << "subset:";
    for (long long v : rr.subset) std::cout << " " << v;
    std::cout << "\ncolor: " << rr.color << "\n";
  }
  std::cout << "families checked: " << rr.families_checked
            << ", subsets checked: " << rr.subsets_checked << "\n";
  finish_run(ctx, rep, "");
  return rr.status == RamseyStatus::budget_exhausted ? 1 : 0;
}

// ------------------------------------------------------- jsm / ucs -------

SequenceGenerator resolve_generator(const std::string& name, int& l, const Rat& p) {
  if (name == "lp") {
    if (l <= 0) l = 1;
    return gen_lp_basis(p, l);
  }
  if (name == "l1-blocks") {
    if (l <= 0) l = 1;
    return gen_l1_blocks(l);
  }
  if (name == "james-pair") {
    if (l > 0 && l != 2)
      throw std::invalid_argument("the james-pair generator has exactly 2 rows");
    l = 2;
    return gen_james_pair();
  }
  if (name == "jt-level-block") {
    if (l <= 0) l = 1;
    return gen_jt_level_block(l);
  }
  // Anything else is a file: {"name", "normalized", "oracle": {"ambient", "p"},
  // "rows": [[vector documents along row 1], [row 2], ...]}.
  json doc = json::parse(read_file(name));
  NormOracle oracle;
  oracle.ambient = doc.at("oracle").at("ambient").get<std::string>();
  if (doc.at("oracle").contains("p"))
    oracle.p = parse_rat(doc.at("oracle").at("p").get<std::string>());
  std::vector<std::vector<FinVec>> lists;
  for (const auto& row : doc.at("rows")) {
    std::vector<FinVec> one;
    for (const auto& v : row)
      one.push_back(require_finvec(vec_read(v.dump()), "generator file"));
    lists.push_back(std::move(one));
  }
  if (l > 0 && l != static_cast<int>(lists.size()))
    throw std::invalid_argument("--l disagrees with the generator file row count");
  l = static_cast<int>(lists.size());
  bool normalized = doc.value("normalized", true);
  return gen_from_vectors(doc.value("name", name), oracle, std::move(lists), normalized);
}

int run_jsm(RunCtx& ctx, const std::string& gen_name, int l, int kmax,
            const std::string& ground_s, const std::string& schedule_s, int budget,
            const std::string& p_s) {
  SequenceGenerator gen = resolve_generator(gen_name, l, parse_rat(p_s));
  auto ground = parse_ground(ground_s);
  StabilizationSchedule sched =
      schedule_s.empty() ? default_schedule(kmax)
                         : StabilizationSchedule{parse_rat_list(schedule_s)};
  CoeffNet net = default_net(l, kmax, ctx.seed);
  JsmEstimate est = jsm_estimate(gen, l, kmax, net, sched, ground, budget);

  const std::vector<Rat> ps = {Rat(1), Rat(3, 2), Rat(2), Rat(3)};
  std::ostringstream csv;
  csv << csv_row({"k", "matrix", "rep_norm_sq", "rep_norm", "oscillation", "ratio_p_1",
                  "ratio_p_3/2", "ratio_p_2", "ratio_p_3"})
      << "\n";
  for (int k = 1; k <= static_cast<int>(est.table.size()); ++k) {
    for (const JsmRow& row : est.table[k - 1]) {
      std::ostringstream mat;
      for (size_t i = 0; i < row.a.size(); ++i) {
        if (i) mat << ';';
        for (size_t j = 0; j < row.a[i].size(); ++j) {
          if (j) mat << ',';
          mat << rat_str(row.a[i][j]);
        }
      }
      std::vector<std::string> fields = {std::to_string(k), mat.str(),
                                         row.rep.exact ? rat_str(row.rep.sq) : "-",
                                         f50_str(row.rep.value), f50_str(row.osc)};
      for (const Rat& cp : ps) {
        F50 sum = 0, pf = to_f50(cp);
        for (const auto& r : row.a)
          for (const Rat& c : r)
            if (c != 0) sum += pow(to_f50(rat_abs(c)), pf);
        F50 ap = pow(sum, F50(1) / pf);
        if (row.rep.value == 0)
          fields.push_back("-");
        else
          fields.push_back(f50_str(F50(std::max(F50(ap / row.rep.value),
                                                F50(row.rep.value / ap)))));
      }
      csv << csv_row(fields) << "\n";
    }
  }

  json rep;
  rep["schema"] = "bsmlab.jsm/1";
  rep["generator"] = gen.name;
  rep["l"] = l;
  rep["kmax"] = kmax;
  rep["ground"] = ground_s;
  rep["node_budget"] = budget;
  json sch = json::array();
  for (const Rat& d : sched.deltas) sch.push_back(rat_str(d));
  rep["schedule"] = sch;
  rep["thinned"] = est.L;
  rep["status"] = est.status;
  rep["failing_k"] = est.failing_k;
  rep["witness"] = est.witness;
  json osc = json::array();
  for (const F50& v : est.osc_per_k) osc.push_back(f50_str(v));
  rep["oscillation_per_k"] = osc;
  json eq = json::array();
  for (const auto& [cp, cv] : est.equiv) eq.push_back({{"p", rat_str(cp)}, {"value", f50_str(cv)}});
  rep["equivalence"] = eq;
  if (est.suppression_set)
    rep["suppression"] = f50_str(est.suppression);
  else
    rep["suppression"] = nullptr;

  std::cout << "status: " << est.status << "\n";
  if (est.status != "stabilized" && est.failing_k > 0)
    std::cout << "failing k: " << est.failing_k << " witness: " << est.witness << "\n";
  std::cout << "thinned set:";
  for (long long v : est.L) std::cout << " " << v;
  std::cout << "\n";
  for (size_t i = 0; i < est.osc_per_k.size(); ++i)
    std::cout << "k=" << (i + 1) << " oscillation " << f50_str(est.osc_per_k[i]) << "\n";
  for (const auto& [cp, cv] : est.equiv)
    std::cout << "equivalence vs l_" << rat_str(cp) << ": " << f50_str(cv) << "\n";
  if (est.suppression_set) std::cout << "suppression: " << f50_str(est.suppression) << "\n";

  finish_run(ctx, rep, csv.str());
  return est.status == "stabilized" ? 0 : 1;
}

int run_ucs(RunCtx& ctx, const std::string& gen_name, int l, int k, const std::string& p_s) {
  SequenceGenerator gen = resolve_generator(gen_name, l, parse_rat(p_s));
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<FinVec> vs;
  for (int j = 1; j <= k; ++j)
    for (int i = 1; i <= l; ++i) vs.push_back(gen.at(i, j));
  CoeffNet net = default_net(l, k, ctx.seed);
  std::vector<std::vector<Rat>> rows;
  for (const auto& a : net.mats) {
    std::vector<Rat> r;
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < l; ++i) r.push_back(a[i][j]);
    rows.push_back(std::move(r));
  }
  SuppressionEstimate se = suppression_constant(vs, gen.oracle, rows);
  json rep;
  rep["schema"] = "bsmlab.ucs/1";
  rep["generator"] = gen.name;
  rep["l"] = l;
  rep["k"] = k;
  rep["value"] = f50_str(se.value);
  rep["exact"] = se.exact;
  if (se.exact) rep["value_sq"] = rat_str(se.sq);
  rep["witness"] = se.witness;
  std::cout << "suppression constant: " << f50_str(se.value) << "\n";
  if (se.exact) std::cout << "squared (exact): " << rat_str(se.sq) << "\n";
  std::cout << "witness: " << se.witness << "\n";
  finish_run(ctx, rep, "");
  return 0;
}

// ---------------------------------------------------------- jt-family ----

int run_jt_family(RunCtx& ctx, int bands, int l, int variant, int budget,
                  const std::string& coeffs_s) {
  if (budget <= 0) budget = 2 * bands;
  LevelBlockFamily fam = build_level_block_family(budget, bands, l, variant);
  std::vector<Rat> coeffs =
      coeffs_s.empty() ? std::vector<Rat>(bands, Rat(1)) : parse_rat_list(coeffs_s);
  LevelBlockCheck chk = level_block_check(fam, coeffs);

  json rep;
  rep["schema"] = "bsmlab.jtfamily/1";
  rep["bands"] = bands;
  rep["l"] = l;
  rep["variant"] = variant;
  rep["depth_budget"] = budget;
  json cj = json::array();
  for (const Rat& c : coeffs) cj.push_back(rat_str(c));
  rep["coeffs"] = cj;
  rep["eps"] = rat_str(fam.eps);
  json es = json::array();
  for (const Rat& e : fam.eps_seq) es.push_back(rat_str(e));
  rep["eps_seq"] = es;
  rep["cert_ii"] = rat_str(fam.cert_ii);
  json bj = json::array();
  for (size_t n = 0; n < fam.bands.size(); ++n) {
    json sj = json::array();
    for (const FinVec& v : fam.sets[n]) sj.push_back(vec_doc(v));
    bj.push_back({{"lo", fam.bands[n].lo}, {"hi", fam.bands[n].hi}, {"vectors", sj}});
  }
  rep["band_sets"] = bj;
  rep["ratio_sq_lower"] = rat_str(chk.lower);
  rep["ratio_sq_upper"] = rat_str(chk.upper);
  rep["selections"] = chk.selections;

  std::cout << "bands: " << bands << " rows: " << l << " variant: " << variant << "\n";
  std::cout << "hypothesis budget: " << rat_str(fam.cert_ii) << " < eps = " << rat_str(fam.eps)
            << "\n";
  std::cout << "selections checked: " << chk.selections << "\n";
  std::cout << "ratio squared range: [" << rat_str(chk.lower) << ", " << rat_str(chk.upper)
            << "] = [" << decimal_str(chk.lower) << ", " << decimal_str(chk.upper) << "]\n";
  finish_run(ctx, rep, "");
  return 0;
}

// -------------------------------------------------------------- uals -----

int run_uals_verify(RunCtx& ctx, const std::string& case_name, long long n,
                    const std::string& p_s, const std::string& q_s, int probes) {
  CaseParams prm;
  prm.n = n;
  prm.p = parse_rat(p_s);
  prm.q = parse_rat(q_s);
  prm.probes = probes;
  prm.seed = ctx.seed;
  GapReport gr = verify_case(case_name, prm);

  json rep;
  rep["schema"] = "bsmlab.uals/1";
  rep["case"] = gr.case_name;
  rep["n"] = gr.n;
  rep["p"] = rat_str(gr.p);
  rep["q"] = rat_str(gr.q);
  rep["probes"] = gr.probes;
  rep["seed"] = gr.seed;
  json pw = json::array();
  for (const auto& [probe, gap] : gr.pointwise) pw.push_back({{"probe", probe}, {"gap", gap}});
  rep["pointwise"] = pw;
  rep["pointwise_exact"] = gr.pointwise_exact;
  if (gr.pointwise_exact) rep["pointwise_worst"] = rat_str(gr.pointwise_worst);
  rep["pointwise_worst_decimal"] = f50_str(gr.pointwise_worst_f);
  rep["pointwise_bound"] = gr.pointwise_bound;
  rep["pointwise_pass"] = gr.pointwise_pass;
  rep["witnesses"] = gr.witnesses;
  rep["minimax_exact"] = gr.minimax_exact;
  if (gr.minimax_exact) rep["minimax_lower"] = rat_str(gr.minimax_lower);
  rep["minimax_lower_decimal"] = f50_str(gr.minimax_lower_f);
  rep["sampled_exact"] = gr.sampled_exact;
  if (gr.sampled_exact) rep["sampled_min"] = rat_str(gr.sampled_min);
  rep["sampled_min_decimal"] = f50_str(gr.sampled_min_f);
  rep["minimax_bound"] = gr.minimax_bound;
  rep["minimax_pass"] = gr.minimax_pass;
  rep["upper_exact"] = gr.upper_exact;
  if (gr.upper_exact) rep["upper"] = rat_str(gr.upper);
  rep["upper_decimal"] = f50_str(gr.upper_f);
  json lam = json::array();
  for (const Rat& w : gr.lambda) lam.push_back(rat_str(w));
  rep["lambda"] = lam;
  rep["notes"] = gr.notes;
  rep["pass"] = gr.pass;

  std::cout << "case: " << gr.case_name << " (n=" << gr.n << ", probes=" << gr.probes << ")\n";
  std::cout << "pointwise worst gap: " << f50_str(gr.pointwise_worst_f) << " vs bound "
            << gr.pointwise_bound << " -> " << (gr.pointwise_pass ? "pass" : "FAIL") << "\n";
  std::cout << "minimax lower: " << f50_str(gr.minimax_lower_f) << ", sampled min: "
            << f50_str(gr.sampled_min_f) << " vs bound " << gr.minimax_bound << " -> "
            << (gr.minimax_pass ? "pass" : "FAIL") << "\n";
  std::cout << "upper at minimizer: " << f50_str(gr.upper_f) << "\n";
  for (const std::string& note : gr.notes) std::cout << "note: " << note << "\n";
  std::cout << "result: " << (gr.pass ? "PASS" : "FAIL") << "\n";

  finish_run(ctx, rep, "");
  return gr.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"bsmlab: exact norms, plegma enumeration, spreading-model tables, and"
               " operator-approximation verification"};
  app.require_subcommand(1);

  RunCtx ctx;
  app.add_option("--seed", ctx.seed, "seed for every stochastic step")->capture_default_str();
  app.add_option("--out", ctx.out_dir, "directory for report, table, and manifest files");
  app.add_option("--jobs", ctx.jobs, "worker cap (current solvers are serial)")
      ->capture_default_str();

  // norm
  std::string space, vec_path, p_s = "2", q_s = "2", registry_path, mixed_q = "2";
  bool witness = false;
  CLI::App* norm = app.add_subcommand("norm", "evaluate a norm on a vector document");
  norm->fallthrough();
  norm->add_option("--space", space, "james | jt | mr | calx | mixed")->required();
  norm->add_option("--vec", vec_path, "vector document (JSON)")->required();
  norm->add_option("--p", p_s, "slot exponent for --space mixed");
  norm->add_option("--q", q_s, "join exponent for --space mixed");
  norm->add_option("--registry", registry_path, "weight registry (JSON lines) for --space mr");
  norm->add_flag("--witness", witness, "print the norming witness");

  // plegma enum/check/shift
  CLI::App* plegma = app.add_subcommand("plegma", "plegma family tools");
  plegma->require_subcommand(1);
  plegma->fallthrough();
  std::string ground_s, family_s;
  int opt_l = 2, opt_k = 2, opt_len = 2;
  bool strict = false;
  CLI::App* penum = plegma->add_subcommand("enum", "enumerate families over a ground set");
  penum->fallthrough();
  penum->add_option("--ground", ground_s, "A..B or comma list")->required();
  penum->add_option("--l", opt_l, "rows")->capture_default_str();
  penum->add_option("--k", opt_k, "columns")->capture_default_str();
  penum->add_flag("--strict", strict, "strict column increase");
  CLI::App* pcheck = plegma->add_subcommand("check", "validate a family literal");
  pcheck->fallthrough();
  pcheck->add_option("family", family_s, "rows 'a,b;c,d'")->required();
  pcheck->add_flag("--strict", strict, "strict column increase");
  CLI::App* pshift = plegma->add_subcommand("shift", "re-place a vector along a family");
  pshift->fallthrough();
  pshift->add_option("--vec", vec_path, "interleaved vector document")->required();
  pshift->add_option("--family", family_s, "rows 'a,b;c,d'")->required();

  // ramsey
  CLI::App* ramsey = app.add_subcommand("ramsey", "colexicographic monochromatic-subset walk");
  ramsey->fallthrough();
  std::string color;
  unsigned long long budget_fams = 50'000'000ull;
  ramsey->add_option("--color", color, "const | parity | gt10")->required();
  ramsey->add_option("--ground", ground_s, "A..B or comma list")->required();
  ramsey->add_option("--len", opt_len, "target subset length")->required();
  ramsey->add_option("--l", opt_l, "rows")->capture_default_str();
  ramsey->add_option("--k", opt_k, "columns")->capture_default_str();
  ramsey->add_option("--budget", budget_fams, "family evaluation budget")->capture_default_str();

  // jsm
  CLI::App* jsm = app.add_subcommand("jsm", "joint spreading table estimate");
  jsm->fallthrough();
  std::string gen_name, schedule_s;
  int kmax = 2, gen_l = 0, node_budget = -1, ucs_k = 2;
  jsm->add_option("--gen", gen_name, "lp | l1-blocks | james-pair | jt-level-block | file")
      ->required();
  jsm->add_option("--l", gen_l, "generator rows (builtin default when omitted)");
  jsm->add_option("--kmax", kmax, "largest family length")->required();
  jsm->add_option("--ground", ground_s, "A..B or comma list")->required();
  jsm->add_option("--schedule", schedule_s, "comma list of deltas (default 1/2^k)");
  jsm->add_option("--budget", node_budget, "thinning removals allowed (default |ground|/2)");
  jsm->add_option("--p", p_s, "exponent for the lp builtin");

  // ucs
  CLI::App* ucs = app.add_subcommand("ucs", "suppression constant of generator vectors");
  ucs->fallthrough();
  ucs->add_option("--gen", gen_name, "lp | l1-blocks | james-pair | jt-level-block | file")
      ->required();
  ucs->add_option("--l", gen_l, "generator rows (builtin default when omitted)");
  ucs->add_option("--k", ucs_k, "positions per row")->capture_default_str();
  ucs->add_option("--p", p_s, "exponent for the lp builtin");

  // jt-family
  CLI::App* jtf = app.add_subcommand("jt-family", "build and check a level block family");
  jtf->fallthrough();
  int bands = 2, jt_l = 1, variant = 0, depth_budget = 0;
  std::string coeffs_s;
  jtf->add_option("--bands", bands, "number of bands")->required();
  jtf->add_option("--l", jt_l, "vectors per band")->capture_default_str();
  jtf->add_option("--variant", variant, "builder variant seed")->capture_default_str();
  jtf->add_option("--budget", depth_budget, "depth budget (default 2*bands)");
  jtf->add_option("--coeffs", coeffs_s, "comma list, one per band (default all 1)");

  // uals verify
  CLI::App* uals = app.add_subcommand("uals", "operator approximation counterexamples");
  uals->require_subcommand(1);
  uals->fallthrough();
  CLI::App* uverify = uals->add_subcommand("verify", "run one named case end to end");
  uverify->fallthrough();
  std::string case_name;
  long long case_n = 3;
  int probes = 200;
  std::string up_s = "3/2", uq_s = "3";
  uverify->add_option("--case", case_name, "ell1 | calx | mixed | rank-one")->required();
  uverify->add_option("--n", case_n, "size parameter")->capture_default_str();
  uverify->add_option("--p", up_s, "slot exponent (mixed case)")->capture_default_str();
  uverify->add_option("--q", uq_s, "join exponent (mixed case)")->capture_default_str();
  uverify->add_option("--probes", probes, "random probes")->capture_default_str();

  int rc = 0;
  norm->callback([&] {
    ctx.command = "norm";
    ctx.params = {{"space", space}, {"vec", vec_path},    {"p", p_s},
                  {"q", q_s},       {"witness", witness}, {"registry", registry_path},
                  {"seed", ctx.seed}};
    rc = run_norm(ctx, space, vec_path, p_s, q_s, witness, registry_path);
  });
  penum->callback([&] {
    ctx.command = "plegma enum";
    ctx.params = {{"ground", ground_s}, {"l", opt_l}, {"k", opt_k}, {"strict", strict},
                  {"seed", ctx.seed}};
    rc = run_plegma_enum(ctx, ground_s, opt_l, opt_k, strict);
  });
  pcheck->callback([&] {
    ctx.command = "plegma check";
    ctx.params = {{"family", family_s}, {"strict", strict}, {"seed", ctx.seed}};
    rc = run_plegma_check(ctx, family_s, strict);
  });
  pshift->callback([&] {
    ctx.command = "plegma shift";
    ctx.params = {{"vec", vec_path}, {"family", family_s}, {"seed", ctx.seed}};
    rc = run_plegma_shift(ctx, vec_path, family_s);
  });
  ramsey->callback([&] {
    ctx.command = "ramsey";
    ctx.params = {{"color", color}, {"ground", ground_s}, {"l", opt_l},
                  {"k", opt_k},     {"len", opt_len},     {"budget", budget_fams},
                  {"seed", ctx.seed}};
    rc = run_ramsey(ctx, color, ground_s, opt_l, opt_k, opt_len, budget_fams);
  });
  jsm->callback([&] {
    ctx.command = "jsm";
    ctx.params = {{"gen", gen_name}, {"l", gen_l},
                  {"kmax", kmax},    {"ground", ground_s},
                  {"schedule", schedule_s}, {"budget", node_budget},
                  {"p", p_s},        {"seed", ctx.seed}};
    rc = run_jsm(ctx, gen_name, gen_l, kmax, ground_s, schedule_s, node_budget, p_s);
  });
  ucs->callback([&] {
    ctx.command = "ucs";
    ctx.params = {{"gen", gen_name}, {"l", gen_l}, {"k", ucs_k}, {"p", p_s},
                  {"seed", ctx.seed}};
    rc = run_ucs(ctx, gen_name, gen_l, ucs_k, p_s);
  });
  jtf->callback([&] {
    ctx.command = "jt-family";
    ctx.params = {{"bands", bands},     {"l", jt_l},
                  {"variant", variant}, {"budget", depth_budget},
                  {"coeffs", coeffs_s}, {"seed", ctx.seed}};
    rc = run_jt_family(ctx, bands, jt_l, variant, depth_budget, coeffs_s);
  });
  uverify->callback([&] {
    ctx.command = "uals verify";
    ctx.params = {{"case", case_name}, {"n", case_n},      {"p", up_s},
                  {"q", uq_s},         {"probes", probes}, {"seed", ctx.seed}};
    rc = run_uals_verify(ctx, case_name, case_n, up_s, uq_s, probes);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
