// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [N | all]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "charfield/charfield.hpp"
#include "charfield/report.hpp"

using namespace charfield;

namespace {

constexpr double kSlackTol = 1e-6;
constexpr double kIndicatorTol = 1e-6;
constexpr double kSieveTol = 1e-6;
constexpr double kFuncFieldMatchTol = 1e-12;
constexpr double kFuncFieldBoundTol = 1e-6;
constexpr std::uint64_t kSweepLimit = 4096;
constexpr std::uint64_t kFuncFieldLimit = 1024;
constexpr std::size_t kRaySamples = 100;
constexpr std::uint64_t kSeed = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Field {
  std::uint64_t p;
  int s, m;
  std::uint64_t q, size;
};

/// Every tower F_{q^m} / F_q with m >= 2 and q^m <= limit.
std::vector<Field> fields_up_to(std::uint64_t limit) {
  std::vector<Field> out;
  for (std::uint64_t q : num::prime_powers_up_to(limit)) {
    const auto pp = num::prime_power(q);
    std::uint64_t size = q * q;
    for (int m = 2; size <= limit; ++m, size *= q) out.push_back({pp->first, pp->second, m, q, size});
  }
  return out;
}

std::string field_name(const Field& f) { return "q=" + std::to_string(f.q) + ",m=" + std::to_string(f.m); }

CharacterSystem system_for(const Field& f) { return CharacterSystem(build_tower(f.p, f.s, f.m), kSeed); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome sweep_criterion(bool katz_only) {
  Outcome o;
  std::uint64_t records = 0, violations = 0, nfields = 0;
  double min_slack = std::numeric_limits<double>::infinity(), spot_err = 0;
  std::string worst;
  for (const Field& f : fields_up_to(kSweepLimit)) {
    const CharacterSystem sys = system_for(f);
    SweepOptions opt;
    opt.seed = kSeed;
    opt.tolerance = kSlackTol;
    opt.psi_trivial_only = katz_only;
    const SweepSummary s = verify_bounds_sweep(sys, opt);
    const KindSummary& k = katz_only ? s.katz : s.main;
    ++nfields;
    records += katz_only ? s.katz.records : s.main.records + s.katz.records;
    violations += katz_only ? s.katz.violations : s.violations;
    spot_err = std::max(spot_err, s.spot_check_max_error);
    const double ms = katz_only ? k.min_slack : s.min_slack();
    if (ms < min_slack) {
      min_slack = ms;
      worst = field_name(f);
    }
    if (katz_only && s.main.records != 0) o.pass = false;
  }
  o.pass = o.pass && violations == 0 && min_slack >= -kSlackTol && spot_err < 1e-9;
  o.detail = std::to_string(nfields) + " fields, " + std::to_string(records) + " bounded records, " + std::to_string(violations) +
             " violations, min slack " + fmt(min_slack) + " (" + worst + "), orbit spot-check error " + fmt(spot_err);
  return o;
}

Outcome criterion_main_bound() { return sweep_criterion(false); }
Outcome criterion_katz_bound() { return sweep_criterion(true); }

Outcome criterion_indicators() {
  Outcome o;
  std::uint64_t checks = 0, mismatches = 0, nfields = 0, count_failures = 0;
  for (const Field& f : fields_up_to(kSweepLimit)) {
    const CharacterSystem sys = system_for(f);
    const TowerContext& ctx = sys.ctx();
    const auto& lat = sys.lattice();
    const auto divs = num::divisors(ctx.group_order_factorization());
    double rho_total = 0, kappa_total = 0;
    for (Handle a = 0; a < ctx.size(); ++a) {
      const CharacterSums sums = character_sums(sys, a);
      if (a != 0) {
        for (std::uint64_t e : divs) {
          const double r = rho_from_sums(sys, sums, e);
          ++checks;
          if (std::abs(r - (is_efree_direct(ctx, a, e) ? 1.0 : 0.0)) >= kIndicatorTol) ++mismatches;
          if (e == ctx.group_order()) rho_total += r;
        }
      }
      for (std::size_t g = 0; g < lat.all.size(); ++g) {
        const double k = kappa_from_sums(sys, sums, g);
        ++checks;
        if (std::abs(k - (is_gfree_direct_index(sys, a, g) ? 1.0 : 0.0)) >= kIndicatorTol) ++mismatches;
        if (g == lat.top()) kappa_total += k;
      }
    }
    const double phi_n = static_cast<double>(num::euler_phi(ctx.group_order_factorization()));
    const double Phi = static_cast<double>(lat.all[lat.top()].phi);
    if (std::abs(rho_total - phi_n) >= kIndicatorTol * phi_n || std::abs(kappa_total - Phi) >= kIndicatorTol * Phi) ++count_failures;
    ++nfields;
  }
  o.pass = mismatches == 0 && count_failures == 0;
  o.detail = std::to_string(nfields) + " fields, " + std::to_string(checks) + " indicator checks, " + std::to_string(mismatches) +
             " mismatches, " + std::to_string(count_failures) + " counting-identity failures";
  return o;
}

Outcome criterion_trace_triple() {
  Outcome o;
  std::uint64_t checks = 0, bad = 0, nfields = 0;
  for (const Field& f : fields_up_to(kSweepLimit)) {
    const CharacterSystem sys = system_for(f);
    for (Handle c = 0; c < sys.ctx().size(); ++c) {
      ++checks;
      if (!trace_triviality_triple(sys, c).agree()) ++bad;
    }
    ++nfields;
  }
  o.pass = bad == 0;
  o.detail = std::to_string(nfields) + " fields, " + std::to_string(checks) + " elements, " + std::to_string(bad) + " disagreements";
  return o;
}

Outcome criterion_sieve() {
  Outcome o;
  std::uint64_t lines = 0, below = 0, sieve_sets = 0, sieve_bad = 0, nfields = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst;
  for (const Field& f : fields_up_to(kSweepLimit)) {
    const CharacterSystem sys = system_for(f);
    const TowerContext& ctx = sys.ctx();
    const TypeBitmap types(sys, true);
    const double bound = lower_bound_N(ctx.q(), ctx.m(), kSeed).value;
    std::vector<std::uint8_t> g1free(ctx.size(), 0);
    for (Handle a = 1; a < ctx.size(); ++a) g1free[a] = is_gfree_direct_index(sys, a, sys.index_g1());
    for (Handle th : ctx.extension_generators())
      for (Handle a : ctx.subfield_q()) {
        if (a == 0 || !g1free[ctx.mul(a, th)]) continue;
        std::uint64_t count = 0;
        for (Handle x : ctx.subfield_q()) count += types.has(ctx.mul(a, ctx.add(th, x)), ElementType::primitive_normal);
        ++lines;
        if (static_cast<double>(count) < bound) ++below;
        if (static_cast<double>(count) - bound < worst_margin) {
          worst_margin = static_cast<double>(count) - bound;
          worst = field_name(f);
        }
      }
    // S1/S2/S3 on the smallest qualifying member of each translate class
    const SieveEvaluator ev(sys);
    for (Handle rep : translate_class_reps(ctx)) {
      Handle pick = 0;
      bool found = false;
      for (Handle x : ctx.subfield_q()) {
        const Handle t = ctx.add(rep, x);
        if (g1free[t] && (!found || t < pick)) {
          pick = t;
          found = true;
        }
      }
      if (!found) continue;
      const SieveDecomposition d = ev.evaluate(pick, types);
      ++sieve_sets;
      const bool ok = d.qualifies && std::abs(d.S1 - cplx(d.expected_S1, 0)) < kSieveTol * std::max(1.0, d.expected_S1) &&
                      std::abs(d.S2) <= d.S2_bound + kSieveTol && std::abs(d.S3) <= d.S3_bound + kSieveTol &&
                      std::abs(d.sieve_count - static_cast<double>(d.count)) < kSieveTol * std::max(1.0, static_cast<double>(d.count));
      if (!ok) ++sieve_bad;
    }
    ++nfields;
  }
  o.pass = below == 0 && sieve_bad == 0;
  o.detail = std::to_string(nfields) + " fields, " + std::to_string(lines) + " qualifying lines, " + std::to_string(below) +
             " below the bound (smallest count - bound " + fmt(worst_margin) + " at " + worst + "); " + std::to_string(sieve_sets) +
             " sieve decompositions, " + std::to_string(sieve_bad) + " off";
  return o;
}

Outcome criterion_gfree_equivalence() {
  Outcome o;
  std::ostringstream d;
  for (auto [p, m] : std::vector<std::pair<std::uint64_t, int>>{{2, 3}, {3, 5}, {2, 5}, {5, 3}}) {
    const CharacterSystem sys(build_tower(p, 1, m), kSeed);
    const GFreeEquivalenceReport r = lemma_gfree_equivalence(sys);
    const bool ok = r.equal && r.counterexamples.empty() && r.free_count == r.generator_count;
    o.pass = o.pass && ok;
    d << "(" << p << "," << m << "): " << r.free_count << " free / " << r.generator_count << " generators, " << r.counterexamples.size()
      << " counterexamples; ";
  }
  o.detail = d.str();
  return o;
}

std::string opt_q(const std::optional<std::uint64_t>& q) { return q ? std::to_string(*q) : "none"; }

Outcome criterion_known_constants() {
  Outcome o;
  std::ostringstream d;
  ScanOptions opt;
  opt.seed = kSeed;
  const ScanReport tp3 = scan_constants(3, 64, LineProperty::tp, ElementType::primitive, opt);
  const bool tp_ok = tp3.largest_failing_q() == 37u && !tp3.truncated && tp3.reached_q == 64;
  d << "TP m=3 q<=64 largest failing q " << opt_q(tp3.largest_failing_q()) << (tp_ok ? " ok" : " WRONG") << "; ";
  const ScanReport lp3 = scan_constants(3, 49, LineProperty::lp, ElementType::primitive, opt);
  const bool lp_ok = lp3.largest_failing_q() == 37u && !lp3.truncated && lp3.reached_q == 49;
  d << "LP m=3 q<=49 largest failing q " << opt_q(lp3.largest_failing_q()) << (lp_ok ? " ok" : " WRONG") << "; ";
  bool m2_ok = true;
  for (auto prop : {LineProperty::tp, LineProperty::wlp, LineProperty::lp})
    for (auto type : {ElementType::primitive, ElementType::primitive_normal}) {
      const ScanReport r = scan_constants(2, 64, prop, type, opt);
      const bool ok = r.failures().empty() && !r.truncated && r.reached_q == 64;
      m2_ok = m2_ok && ok;
      d << property_name(prop) << "/" << element_type_name(type) << " m=2 q<=64 failures " << r.failures().size() << "; ";
    }
  o.pass = tp_ok && lp_ok && m2_ok;
  o.detail = d.str();
  return o;
}

Outcome criterion_function_field() {
  Outcome o;
  std::uint64_t specs = 0, mismatch = 0, over = 0, ray_fail = 0, singular = 0, nfields = 0, full_api = 0;
  double worst_diff = 0;
  for (const Field& f : fields_up_to(kFuncFieldLimit)) {
    const CharacterSystem sys = system_for(f);
    const TowerContext& ctx = sys.ctx();
    const SubfieldTables sub(ctx);
    std::vector<std::uint64_t> js(ctx.group_order());
    for (std::uint64_t j = 0; j < js.size(); ++j) js[j] = j;
    for (Handle th : ctx.extension_generators()) {
      RayCharSpec X = make_ray_char(sys, th, 0, 0);
      const MixedSumTable tab(sys, sub, th, js);
      const DegreeOnePlaces places(X);
      const auto samples = ray_triviality_samples(X, kRaySamples, kSeed);
      NonsingularitySearch search(ctx, th, X.g);
      const double bound = static_cast<double>(X.I.degree() - 2) * std::sqrt(static_cast<double>(ctx.q()));
      for (std::uint64_t j : js)
        for (std::size_t bi = 0; bi < sub.q(); ++bi) {
          X.j = j;
          X.b = sub.at(bi);
          if (X.trivial()) continue;
          ++specs;
          const cplx s = places.sum(j, X.b);
          const double diff = std::abs(s - tab.value(j, bi));
          worst_diff = std::max(worst_diff, diff);
          if (diff >= kFuncFieldMatchTol) ++mismatch;
          if (std::abs(s) > bound + kFuncFieldBoundTol) ++over;
          if (ctx.size() <= 64) {
            // the one-shot entry point, on the smallest fields
            const DegreeOneSum d1 = degree_one_sum(X, kFuncFieldMatchTol);
            ++full_api;
            if (!d1.matches_mixed_sum || !d1.within_bound || std::abs(d1.sum - s) >= kFuncFieldMatchTol) ++mismatch;
          }
          if (verify_ray_triviality(X, samples).passes != kRaySamples) ++ray_fail;
          try {
            if (is_one(verify_nonsingularity(X, &search).value)) ++singular;
          } catch (const Error&) {
            ++singular;
          }
        }
    }
    ++nfields;
  }
  o.pass = mismatch == 0 && over == 0 && ray_fail == 0 && singular == 0;
  o.detail = std::to_string(nfields) + " fields, " + std::to_string(specs) + " specs (" + std::to_string(full_api) +
             " also through degree_one_sum), max |degree-one sum - mixed sum| " + fmt(worst_diff) + ", " + std::to_string(mismatch) +
             " mismatches, " + std::to_string(over) + " over bound, " + std::to_string(ray_fail) + " ray-triviality failures, " +
             std::to_string(singular) + " without a nonsingularity witness";
  return o;
}

Outcome criterion_wlpn_scan() {
  Outcome o;
  ScanOptions opt;
  opt.seed = kSeed;
  opt.residues = {2};
  const ScanReport r = scan_constants(3, 32, LineProperty::wlp, ElementType::primitive_normal, opt);
  std::uint64_t scanned = 0, reverified = 0, positive_failures = 0;
  std::ostringstream fails;
  for (const auto& e : r.entries) {
    if (e.q % 3 == 2 && !e.scanned) o.pass = false;
    if (!e.scanned) continue;
    ++scanned;
    if (e.passed) continue;
    fails << e.q << " ";
    if (e.lower_bound > 0) ++positive_failures;
    if (!e.witness) continue;
    const auto pp = num::prime_power(e.q);
    TowerOptions to;
    to.seed = opt.seed;
    to.size_cap = opt.size_cap;
    const CharacterSystem sys(build_tower(pp->first, pp->second, 3, to), opt.seed);
    if (count_on_line(sys, *e.witness, ElementType::primitive_normal) == 0) ++reverified;
  }
  const std::size_t nfail = r.failures().size();
  o.pass = o.pass && !r.truncated && reverified == nfail && positive_failures == 0;
  o.detail = std::to_string(scanned) + " q scanned (q = 2 mod 3, q <= 32), failures: " + (nfail ? fails.str() : std::string("none ")) +
             "; " + std::to_string(reverified) + "/" + std::to_string(nfail) + " witnesses re-verified, " + std::to_string(positive_failures) +
             " failures with a positive lower bound";
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string sweep_json(std::uint64_t p, int s, int m) {
  const CharacterSystem sys(build_tower(p, s, m), kSeed);
  report::json arr = report::json::array();
  SweepOptions opt;
  opt.theta_mode = ThetaMode::sample;
  opt.sample_k = 4;
  opt.seed = kSeed;
  opt.sink = [&](const SumRecord& r) { arr.push_back(report::to_json(r)); };
  verify_bounds_sweep(sys, opt);
  return arr.dump(2);
}

Outcome criterion_determinism() {
  Outcome o;
  std::uint64_t compared = 0, differ = 0;
  for (int k = 0; k < 2; ++k) {
    ++compared;
    if (sweep_json(2, 2, 3) != sweep_json(2, 2, 3)) ++differ;
  }
#ifdef CHARFIELD_CLI_PATH
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "charfield_acceptance_determinism";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> runs = {
      "field-info --p 3 --s 2 --m 2",
      "verify-mixed-bound --p 2 --s 2 --m 3 --theta sample:5",
      "verify-fuwan --p 3 --s 1 --m 2 --f 3,0,1/1 --g 0,1/1 --chi 4 --psi 1",
      "count-line --p 5 --s 1 --m 2 --theta 5 --alpha 7",
      "lower-bound --p 7 --s 1 --m 3",
      "scan --m 3 --q-max 16 --property wlp --type primitive-normal",
      "ray-check --p 2 --s 1 --m 4 --theta 2 --chi 3 --psi 1 --samples 50",
  };
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (const char* format : {"json", "csv", "text"}) {
      std::string out[2];
      for (int k = 0; k < 2; ++k) {
        const auto path = dir / ("run" + std::to_string(i) + "_" + format + "_" + std::to_string(k));
        const std::string cmd = std::string("\"") + CHARFIELD_CLI_PATH + "\" --seed 11 --format " + format + " --out \"" + path.string() +
                                "\" " + runs[i] + " >/dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        if (rc != 0) {
          o.pass = false;
          o.detail += "[" + runs[i] + " exited with status " + std::to_string(rc) + "] ";
        }
        out[k] = slurp(path);
      }
      ++compared;
      if (out[0] != out[1] || out[0].empty()) ++differ;
    }
  std::filesystem::remove_all(dir);
#endif
  o.pass = o.pass && differ == 0;
  o.detail += std::to_string(compared) + " report pairs compared, " + std::to_string(differ) + " differ";
  return o;
}

const std::vector<std::pair<const char*, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<const char*, std::function<Outcome()>>> c = {
      {"main mixed-sum bound", criterion_main_bound},
      {"bound for trivial additive character", criterion_katz_bound},
      {"character-sum indicators", criterion_indicators},
      {"trace triviality equivalence", criterion_trace_triple},
      {"sieve lower bound on lines", criterion_sieve},
      {"generators are exactly the g1-free elements", criterion_gfree_equivalence},
      {"known line-property constants", criterion_known_constants},
      {"function-field cross-check", criterion_function_field},
      {"primitive normal weak-line scan", criterion_wlpn_scan},
      {"determinism", criterion_determinism},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  const auto& cs = criteria();
  std::vector<std::size_t> run;
  if (which == "all") {
    for (std::size_t i = 0; i < cs.size(); ++i) run.push_back(i);
  } else {
    char* end = nullptr;
    const unsigned long n = std::strtoul(which.c_str(), &end, 10);
    if (*end != '\0' || n < 1 || n > cs.size()) {
      std::cerr << "usage: acceptance [1-" << cs.size() << " | all]\n";
      return 2;
    }
    run.push_back(n - 1);
  }
  bool all = true;
  for (std::size_t i : run) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cs[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " [" << cs[i].first << "] " << o.detail << " ("
              << fmt(secs) << " s)" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
