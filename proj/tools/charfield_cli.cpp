// charfield: command-line front end. Exit codes: 0 pass, 1 verification
// failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "charfield/charfield.hpp"
#include "charfield/report.hpp"

namespace {

using namespace charfield;
using report::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string cache_dir;
  std::uint64_t seed = 0;
  std::uint64_t size_cap = std::uint64_t{1} << 22;
  double tolerance = 1e-6;
  unsigned threads = 1;
  std::string format = "json";
  std::string out;
};

struct FieldArgs {
  std::uint64_t p = 0;
  int s = 1, m = 2;
};

struct Output {
  json doc = json::object();
  std::vector<SumRecord> records;
  bool has_records = false;
  json csv_rows;  // array of flat objects for csv, when records are absent
  bool failed = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw UsageError(std::string("bad ") + what + ": '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + what + ": '" + s + "'");
  }
}

std::vector<std::uint64_t> parse_list(const std::string& s, const char* what) {
  std::vector<std::uint64_t> v;
  if (s.empty()) return v;
  for (const auto& t : split(s, ',')) v.push_back(parse_u64(t, what));
  return v;
}

Handle parse_handle(const TowerContext& ctx, std::uint64_t v, const char* what) {
  if (v >= ctx.size()) throw UsageError(std::string(what) + " handle " + std::to_string(v) + " out of range [0, " + std::to_string(ctx.size()) + ")");
  return static_cast<Handle>(v);
}

PolyE parse_poly_e(const TowerContext& ctx, const std::string& s) {
  std::vector<Handle> c;
  for (auto v : parse_list(s, "polynomial coefficient")) c.push_back(parse_handle(ctx, v, "coefficient"));
  return PolyE(&ctx, std::move(c));
}

RationalE parse_rational(const TowerContext& ctx, const std::string& s) {
  const auto slash = s.find('/');
  const PolyE num = parse_poly_e(ctx, s.substr(0, slash));
  const PolyE den = slash == std::string::npos ? PolyE::one(&ctx) : parse_poly_e(ctx, s.substr(slash + 1));
  if (den.is_zero()) throw UsageError("zero denominator in '" + s + "'");
  return RationalE::make(num, den);
}

ContextPtr make_ctx(const FieldArgs& f, const RunConfig& cfg) {
  TowerOptions o;
  o.seed = cfg.seed;
  o.size_cap = cfg.size_cap;
  return build_tower(f.p, f.s, f.m, o);
}

json poly_json(const PolyQ& f) { return json(f.coeffs()); }

json field_json(const TowerContext& ctx) {
  json j;
  j["p"] = ctx.p();
  j["s"] = ctx.s();
  j["m"] = ctx.m();
  j["q"] = ctx.q();
  return j;
}

json line_json(const LineSpec& l) {
  json j;
  j["theta"] = l.theta;
  j["alpha"] = l.alpha;
  j["scope"] = l.scope == LineScope::translate ? "translate" : l.scope == LineScope::weak ? "weak" : "full";
  return j;
}

json summary_json(const SweepSummary& s) {
  auto kind = [](const KindSummary& k) {
    json j;
    j["records"] = k.records;
    j["violations"] = k.violations;
    j["min_slack"] = k.records ? json(report::round12(k.min_slack)) : json(nullptr);
    j["max_ratio"] = report::round12(k.max_ratio);
    return j;
  };
  json j;
  j["q"] = s.q;
  j["m"] = s.m;
  j["thetas"] = s.thetas;
  j["thetas_evaluated"] = s.thetas_evaluated;
  j["records"] = s.records;
  j["violations"] = s.violations;
  j["orbit_reduced"] = s.orbit_reduced;
  j["spot_checks"] = s.spot_checks;
  j["min_slack"] = std::isfinite(s.min_slack()) ? json(report::round12(s.min_slack())) : json(nullptr);
  json w;
  w["theta"] = s.argmin.theta;
  w["chi_index"] = s.argmin.chi_index;
  w["psi_param"] = s.argmin.psi_param;
  w["modulus"] = report::round12(s.argmin.modulus);
  j["argmin"] = std::isfinite(s.min_slack()) ? w : json(nullptr);
  j["max_ratio_modulus_over_sqrt_q"] = report::round12(s.max_ratio);
  j["unbounded_records"] = s.unbounded;
  j["main"] = kind(s.main);
  j["katz"] = kind(s.katz);
  return j;
}

void cmd_field_info(const FieldArgs& fa, const RunConfig& cfg, bool print_basis, const std::string& decode, Output& out) {
  const auto ctx = make_ctx(fa, cfg);
  const CharacterSystem sys(ctx, cfg.seed);
  json& d = out.doc;
  d["command"] = "field-info";
  d["field"] = field_json(*ctx);
  d["size"] = ctx->size();
  d["group_order"] = ctx->group_order();
  d["group_order_factorization"] = num::format_factorization(ctx->group_order_factorization());
  d["modulus_fp"] = ctx->modulus();
  d["gamma"] = ctx->gamma().handle();
  d["subfield_q"] = ctx->subfield_q();
  json facs = json::array();
  for (const auto& [g, e] : sys.lattice().fac.factors) facs.push_back(json{{"factor", poly_json(g)}, {"multiplicity", e}});
  d["xm1_factorization"] = facs;
  d["W_xm1"] = sys.lattice().W;
  d["W_group_order"] = num::squarefree_divisor_count(ctx->group_order_factorization());
  d["extension_generators"] = ctx->extension_generators().size();
  std::vector<std::uint64_t> handles = parse_list(decode, "handle");
  if (print_basis) {
    json basis = json::array();
    for (int i = 0; i < ctx->degree(); ++i) basis.push_back(ctx->basis_element(i));
    d["fp_basis_handles"] = basis;
    if (handles.empty()) handles = {ctx->gamma().handle()};
  }
  if (!handles.empty()) {
    json dec = json::object();
    for (auto h : handles) dec[std::to_string(h)] = ctx->digits(parse_handle(*ctx, h, "decode"));
    d["decoded_digits"] = dec;
  }
}

void cmd_verify_mixed(const FieldArgs& fa, const RunConfig& cfg, const std::string& theta_sel, const std::string& chi_orders,
                      bool katz_only, bool summary_only, Output& out) {
  const auto ctx = make_ctx(fa, cfg);
  const CharacterSystem sys(ctx, cfg.seed);
  SweepOptions o;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  o.tolerance = cfg.tolerance;
  o.psi_trivial_only = katz_only;
  o.chi_orders = parse_list(chi_orders, "character order");
  for (auto d : o.chi_orders)
    if (d == 0 || ctx->group_order() % d != 0) throw UsageError("character order " + std::to_string(d) + " does not divide q^m - 1");
  if (theta_sel == "all") {
    o.theta_mode = ThetaMode::all;
  } else if (theta_sel.rfind("sample:", 0) == 0) {
    o.theta_mode = ThetaMode::sample;
    o.sample_k = parse_u64(theta_sel.substr(7), "sample size");
  } else {
    throw UsageError("--theta must be 'all' or 'sample:K'");
  }
  if (!summary_only) {
    out.has_records = true;
    o.sink = [&](const SumRecord& r) { out.records.push_back(r); };
  }
  const SweepSummary s = verify_bounds_sweep(sys, o);
  out.doc["command"] = "verify-mixed-bound";
  out.doc["field"] = field_json(*ctx);
  out.doc["tolerance"] = cfg.tolerance;
  out.doc["summary"] = summary_json(s);
  out.failed = s.violations > 0;
}

void cmd_verify_fuwan(const FieldArgs& fa, const RunConfig& cfg, const std::string& f, const std::string& g, std::uint64_t j,
                      std::uint64_t b, Output& out) {
  const auto ctx = make_ctx(fa, cfg);
  const CharacterSystem sys(ctx, cfg.seed);
  if (j >= ctx->group_order()) throw UsageError("--chi out of range");
  if (b >= ctx->size() || !ctx->in_subfield(static_cast<Handle>(b))) throw UsageError("--psi must be a handle of F_q");
  const SumRecord r = fuwan_sum(sys, parse_rational(*ctx, f), parse_rational(*ctx, g), j, static_cast<Handle>(b), cfg.tolerance);
  out.has_records = true;
  out.records.push_back(r);
  out.doc["command"] = "verify-fuwan";
  out.doc["field"] = field_json(*ctx);
  out.doc["degree_convention"] = "D1 = max(deg num f, deg den f)";
  out.failed = r.degenerate_or_bug;
}

void cmd_count_line(const FieldArgs& fa, const RunConfig& cfg, std::uint64_t theta, std::uint64_t alpha, const std::string& type,
                    Output& out) {
  const auto ctx = make_ctx(fa, cfg);
  const CharacterSystem sys(ctx, cfg.seed);
  if (alpha == 0) throw UsageError("--alpha must be nonzero");
  const Handle th = parse_handle(*ctx, theta, "theta"), al = parse_handle(*ctx, alpha, "alpha");
  if (!ctx->is_extension_generator(th)) throw UsageError("--theta is not an extension generator");
  const ElementType t = parse_element_type(type);
  const LineSpec line = make_line(*ctx, th, al);
  out.doc["command"] = "count-line";
  out.doc["field"] = field_json(*ctx);
  out.doc["line"] = line_json(line);
  out.doc["type"] = element_type_name(t);
  out.doc["count"] = count_on_line(sys, line, t);
}

void cmd_lower_bound(const FieldArgs& fa, const RunConfig& cfg, Output& out) {
  TowerOptions o;
  o.seed = cfg.seed;
  o.size_cap = cfg.size_cap;
  const auto ctx = build_tower(fa.p, fa.s, 2, o);
  const LowerBound lb = lower_bound_N(*ctx, fa.m, cfg.seed);
  json& d = out.doc;
  d["command"] = "lower-bound";
  d["q"] = lb.q;
  d["m"] = lb.m;
  d["group_order"] = lb.group_order;
  d["W_group_order"] = lb.W_N;
  d["eps_group_order"] = json{{"num", lb.eps_N.num}, {"den", lb.eps_N.den}};
  d["W_xm1"] = lb.W_xm1;
  d["W_g1"] = lb.W_g1;
  d["eps_xm1"] = json{{"num", lb.eps_xm1.num}, {"den", lb.eps_xm1.den}};
  d["eps_g1"] = json{{"num", lb.eps_g1.num}, {"den", lb.eps_g1.den}};
  d["sqrt_q"] = report::round12(lb.sqrt_q);
  d["bracket"] = report::round12(lb.bracket);
  d["value"] = report::round12(lb.value);
  d["informative"] = lb.value > 0;
}

void cmd_scan(const RunConfig& cfg, int m, std::uint64_t q_max, const std::string& prop, const std::string& type, bool require_res,
              const std::string& residues, Output& out) {
  if (m < 2) throw UsageError("--m must exceed 1");
  ScanOptions o;
  o.require_primitive_residue = require_res;
  o.residues = parse_list(residues, "residue");
  o.seed = cfg.seed;
  o.size_cap = cfg.size_cap;
  o.threads = cfg.threads;
  const ScanReport r = scan_constants(m, q_max, parse_property(prop), parse_element_type(type), o);
  json& d = out.doc;
  d["command"] = "scan";
  d["m"] = m;
  d["property"] = property_name(r.property);
  d["type"] = element_type_name(r.type);
  d["scan_limit"] = r.scan_limit;
  d["require_primitive_residue"] = r.require_primitive_residue;
  d["truncated_at_size_cap"] = r.truncated;
  d["reached_q"] = r.reached_q;
  d["q_list"] = r.q_list();
  const auto lf = r.largest_failing_q();
  const auto lfh = r.largest_failing_q_within_hypothesis();
  d["largest_failing_q"] = lf ? json(*lf) : json(nullptr);
  d["largest_failing_q_within_hypothesis"] = lfh ? json(*lfh) : json(nullptr);
  d["caveat"] = "constants are relative to scan_limit; q above it were not examined";
  json entries = json::array();
  out.csv_rows = json::array();
  for (const auto& e : r.entries) {
    json j;
    j["q"] = e.q;
    j["scanned"] = e.scanned;
    j["skip_reason"] = e.skip_reason;
    j["primitive_residue"] = e.primitive_residue;
    j["within_hypothesis"] = e.within_hypothesis;
    j["passed"] = e.scanned ? json(e.passed) : json(nullptr);
    j["lines_checked"] = e.lines_checked;
    j["lower_bound"] = e.scanned ? json(report::round12(e.lower_bound)) : json(nullptr);
    j["witness"] = e.witness ? line_json(*e.witness) : json(nullptr);
    entries.push_back(j);
    json row = j;
    row.erase("witness");
    row["witness_theta"] = e.witness ? json(e.witness->theta) : json(nullptr);
    row["witness_alpha"] = e.witness ? json(e.witness->alpha) : json(nullptr);
    out.csv_rows.push_back(row);
  }
  d["entries"] = entries;
}

void cmd_ray_check(const FieldArgs& fa, const RunConfig& cfg, std::uint64_t theta, std::uint64_t j, std::uint64_t b,
                   std::size_t samples, Output& out) {
  const auto ctx = make_ctx(fa, cfg);
  const CharacterSystem sys(ctx, cfg.seed);
  const Handle th = parse_handle(*ctx, theta, "theta");
  if (!ctx->is_extension_generator(th)) throw UsageError("--theta is not an extension generator");
  if (j >= ctx->group_order()) throw UsageError("--chi out of range");
  if (b >= ctx->size() || !ctx->in_subfield(static_cast<Handle>(b))) throw UsageError("--psi must be a handle of F_q");
  if (j == 0 && b == 0) throw UsageError("chi and psi are both trivial");
  const RayCharSpec X = make_ray_char(sys, th, j, static_cast<Handle>(b));
  json& d = out.doc;
  d["command"] = "ray-check";
  d["field"] = field_json(*ctx);
  d["theta"] = th;
  d["chi_index"] = j;
  d["psi_param"] = b;
  d["minimal_polynomial"] = poly_json(X.g);
  d["deg_I"] = X.I.degree();

  const DegreeOneSum s = degree_one_sum(X);
  d["degree_one_sum"] = json{{"re", report::round12(s.sum.real())},
                             {"im", report::round12(s.sum.imag())},
                             {"modulus", report::round12(std::abs(s.sum))},
                             {"bound", report::round12(s.bound)},
                             {"within_bound", s.within_bound},
                             {"matches_mixed_sum", s.matches_mixed_sum}};
  const RayTrivialityReport t = verify_ray_triviality(X, samples, cfg.seed);
  json tj{{"samples", t.samples}, {"passes", t.passes}};
  json fails = json::array();
  for (const auto& [smp, v] : t.failures)
    fails.push_back(json{{"fa", poly_json(smp.fa)}, {"fb", poly_json(smp.fb)}, {"re", report::round12(v.real())}, {"im", report::round12(v.imag())}});
  tj["failures"] = fails;
  d["ray_triviality"] = tj;
  bool nonsingular = true;
  try {
    const NonsingularityWitness w = verify_nonsingularity(X);
    d["nonsingularity"] = json{{"fa", poly_json(w.fa)},
                               {"fb", poly_json(w.fb)},
                               {"witness", w.witness.to_string()},
                               {"re", report::round12(w.value.real())},
                               {"im", report::round12(w.value.imag())},
                               {"candidates_tried", w.candidates_tried}};
  } catch (const Error& e) {
    if (e.code() != Errc::SearchExhausted) throw;
    nonsingular = false;
    d["nonsingularity"] = json{{"error", e.what()}};
  }
  out.failed = !s.within_bound || !s.matches_mixed_sum || t.passes != t.samples || !nonsingular;
}

std::string render(const Output& out, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    json d = out.doc;
    if (out.has_records) {
      json recs = json::array();
      for (const auto& r : out.records) recs.push_back(report::to_json(r));
      d["records"] = recs;
    }
    d["status"] = out.failed ? "fail" : "pass";
    os << d.dump(2) << '\n';
  } else if (format == "csv") {
    if (out.has_records) {
      report::write_csv(os, out.records);
    } else if (out.csv_rows.is_array() && !out.csv_rows.empty()) {
      bool first = true;
      for (const auto& row : out.csv_rows) {
        if (first) {
          bool f = true;
          for (auto it = row.begin(); it != row.end(); ++it) os << (f ? "" : ",") << it.key(), f = false;
          os << '\n';
          first = false;
        }
        bool f = true;
        for (auto it = row.begin(); it != row.end(); ++it) {
          os << (f ? "" : ",");
          f = false;
          if (it->is_string()) os << it->get<std::string>();
          else if (!it->is_null()) os << it->dump();
        }
        os << '\n';
      }
    } else {
      os << "key,value\n";
      for (auto it = out.doc.begin(); it != out.doc.end(); ++it)
        if (!it->is_structured()) os << it.key() << ',' << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
    }
  } else {
    for (auto it = out.doc.begin(); it != out.doc.end(); ++it) {
      if (it->is_object()) {
        for (auto jt = it->begin(); jt != it->end(); ++jt)
          if (!jt->is_structured()) os << it.key() << '.' << jt.key() << ": " << (jt->is_string() ? jt->get<std::string>() : jt->dump()) << '\n';
      } else if (!it->is_array()) {
        os << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
      }
    }
    if (out.has_records) os << "records: " << out.records.size() << '\n';
    os << "status: " << (out.failed ? "fail" : "pass") << '\n';
  }
  return os.str();
}

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::NonPrime:
    case Errc::SizeExceeded:
    case Errc::InvalidArgument:
    case Errc::NotAGenerator:
    case Errc::NotADivisor:
    case Errc::ZeroElement:
    case Errc::ZeroPolynomial:
    case Errc::ZeroFunction:
    case Errc::DivisionByZero:
    case Errc::BothTrivial:
    case Errc::PreconditionFailed:
    case Errc::HypothesisFailed:
    case Errc::UndefinedEverywhere:
    case Errc::ContextMismatch:
      return kExitUsage;
    default:
      return kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact mixed character sums, primitive normal elements on lines, and related checks over finite field towers"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--cache-dir", cfg.cache_dir, "Directory of the integer factorization cache (overrides CHARFIELD_CACHE)");
  app.add_option("--seed", cfg.seed, "Seed for modulus search, polynomial factoring and sampling");
  app.add_option("--size-cap", cfg.size_cap, "Largest admissible q^m")->check(CLI::Range(std::uint64_t{4}, std::uint64_t{1} << 24));
  app.add_option("--tolerance", cfg.tolerance, "Bound comparison tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--out", cfg.out, "Write the report here instead of stdout");
  app.fallthrough();

  FieldArgs fa;
  auto add_field = [&](CLI::App* sc) {
    sc->add_option("--p", fa.p, "Characteristic")->required();
    sc->add_option("--s", fa.s, "q = p^s")->required()->check(CLI::PositiveNumber);
    sc->add_option("--m", fa.m, "Extension degree")->required()->check(CLI::Range(2, 64));
  };

  auto* info = app.add_subcommand("field-info", "Tower summary and factorizations");
  add_field(info);
  bool print_basis = false;
  std::string decode;
  info->add_flag("--print-basis", print_basis, "Show the F_p basis handles and decode gamma (or --decode handles)");
  info->add_option("--decode", decode, "Comma-separated handles to decode into F_p digits");

  auto* mixed = app.add_subcommand("verify-mixed-bound", "Sweep mixed sums against their bounds");
  add_field(mixed);
  std::string theta_sel = "all", chi_orders;
  bool katz_only = false, summary_only = false;
  mixed->add_option("--theta", theta_sel, "all | sample:K");
  mixed->add_option("--chi-orders", chi_orders, "Comma-separated character orders (default: all)");
  mixed->add_flag("--psi-trivial-only", katz_only, "Restrict to trivial psi");
  mixed->add_flag("--summary-only", summary_only, "Omit per-record output");

  auto* fuwan = app.add_subcommand("verify-fuwan", "Sum with rational arguments and its degree bound");
  add_field(fuwan);
  std::string fstr, gstr;
  std::uint64_t chi = 0, psi = 0;
  fuwan->add_option("--f", fstr, "NUM/DEN, coefficient handles constant term first")->required();
  fuwan->add_option("--g", gstr, "NUM/DEN, coefficient handles constant term first")->required();
  fuwan->add_option("--chi", chi, "Multiplicative character index j")->required();
  fuwan->add_option("--psi", psi, "Additive parameter b in F_q")->required();

  auto* count = app.add_subcommand("count-line", "Count elements of a type on alpha(theta + F_q)");
  add_field(count);
  std::uint64_t theta = 0, alpha = 0;
  std::string type = "primitive-normal";
  count->add_option("--theta", theta, "Generator handle")->required();
  count->add_option("--alpha", alpha, "Direction handle")->required();
  count->add_option("--type", type, "primitive | normal | primitive-normal")->check(CLI::IsMember({"primitive", "normal", "primitive-normal"}));

  auto* lower = app.add_subcommand("lower-bound", "Sieve lower bound with intermediate quantities");
  add_field(lower);

  auto* scan = app.add_subcommand("scan", "Scan prime powers for a line property");
  int scan_m = 2;
  std::uint64_t q_max = 0;
  std::string prop = "tp", scan_type = "primitive", residues;
  bool require_res = false;
  scan->add_option("--m", scan_m, "Extension degree")->required()->check(CLI::Range(2, 64));
  scan->add_option("--q-max", q_max, "Largest q scanned")->required();
  scan->add_option("--property", prop, "tp | wlp | lp")->required()->check(CLI::IsMember({"tp", "wlp", "lp"}));
  scan->add_option("--type", scan_type, "primitive | primitive-normal")->required()->check(CLI::IsMember({"primitive", "primitive-normal"}));
  scan->add_flag("--require-primitive-residue", require_res, "Skip q not primitive modulo m for primitive-normal wlp");
  scan->add_option("--residues", residues, "Keep only q with q mod m in this comma-separated list");

  auto* ray = app.add_subcommand("ray-check", "Function-field checks of the character modulo I");
  add_field(ray);
  std::uint64_t rtheta = 0, rchi = 0, rpsi = 0;
  std::size_t samples = 100;
  ray->add_option("--theta", rtheta, "Generator handle")->required();
  ray->add_option("--chi", rchi, "Multiplicative character index j")->required();
  ray->add_option("--psi", rpsi, "Additive parameter b in F_q")->required();
  ray->add_option("--samples", samples, "Ray-triviality samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::unique_ptr<num::FactorCache> cache;
  try {
    std::optional<std::filesystem::path> dir;
    if (!cfg.cache_dir.empty()) dir = cfg.cache_dir;
    else dir = num::FactorCache::env_dir();
    if (dir) {
      cache = std::make_unique<num::FactorCache>(*dir);
      num::global_factor_cache() = cache.get();
    }

    Output out;
    if (*info) cmd_field_info(fa, cfg, print_basis, decode, out);
    else if (*mixed) cmd_verify_mixed(fa, cfg, theta_sel, chi_orders, katz_only, summary_only, out);
    else if (*fuwan) cmd_verify_fuwan(fa, cfg, fstr, gstr, chi, psi, out);
    else if (*count) cmd_count_line(fa, cfg, theta, alpha, type, out);
    else if (*lower) cmd_lower_bound(fa, cfg, out);
    else if (*scan) cmd_scan(cfg, scan_m, q_max, prop, scan_type, require_res, residues, out);
    else if (*ray) cmd_ray_check(fa, cfg, rtheta, rchi, rpsi, samples, out);

    const std::string bytes = render(out, cfg.format);
    if (cfg.out.empty()) std::cout << bytes;
    else report::write_file(cfg.out, bytes);
    return out.failed ? kExitFail : kExitPass;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
