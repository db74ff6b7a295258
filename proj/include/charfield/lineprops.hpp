#pragma once

// Primitive / normal elements on lines alpha(theta + F_q), the sieve lower
// bound for their number, and translate / weak-line / line property scans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "charfield/characters.hpp"
#include "charfield/charsum.hpp"
#include "charfield/error.hpp"
#include "charfield/ff_core.hpp"
#include "charfield/freeness.hpp"
#include "charfield/numutil.hpp"
#include "charfield/parallel.hpp"
#include "charfield/polyring.hpp"

namespace charfield {

enum class LineScope { translate, weak, full };
enum class ElementType { primitive, normal, primitive_normal };
enum class LineProperty { tp, wlp, lp };

inline const char* element_type_name(ElementType t) {
  switch (t) {
    case ElementType::primitive: return "primitive";
    case ElementType::normal: return "normal";
    case ElementType::primitive_normal: return "primitive-normal";
  }
  return "";
}

inline ElementType parse_element_type(const std::string& s) {
  if (s == "primitive") return ElementType::primitive;
  if (s == "normal") return ElementType::normal;
  if (s == "primitive-normal" || s == "primitive_normal") return ElementType::primitive_normal;
  throw Error(Errc::InvalidArgument, "unknown element type " + s);
}

inline const char* property_name(LineProperty p) {
  switch (p) {
    case LineProperty::tp: return "tp";
    case LineProperty::wlp: return "wlp";
    case LineProperty::lp: return "lp";
  }
  return "";
}

inline LineProperty parse_property(const std::string& s) {
  if (s == "tp") return LineProperty::tp;
  if (s == "wlp") return LineProperty::wlp;
  if (s == "lp") return LineProperty::lp;
  throw Error(Errc::InvalidArgument, "unknown property " + s);
}

struct LineSpec {
  Handle theta = 0;
  Handle alpha = 1;
  LineScope scope = LineScope::translate;
};

inline LineScope scope_of(const TowerContext& ctx, Handle alpha) {
  if (alpha == 1) return LineScope::translate;
  return ctx.in_subfield(alpha) ? LineScope::weak : LineScope::full;
}

inline LineSpec make_line(const TowerContext& ctx, Handle theta, Handle alpha) {
  require_generator(ctx, theta);
  if (alpha == 0 || alpha >= ctx.size()) throw Error(Errc::InvalidArgument, "line direction must be a nonzero element");
  return {theta, alpha, scope_of(ctx, alpha)};
}

/// Per-element type flags for a whole tower.
class TypeBitmap {
 public:
  static constexpr std::uint8_t kPrimitive = 1, kNormal = 2;

  TypeBitmap(const CharacterSystem& sys, bool with_normal) : flags_(sys.ctx().size(), 0) {
    const TowerContext& ctx = sys.ctx();
    const NormalityTest normal(sys);
    for (Handle a = 1; a < ctx.size(); ++a) {
      std::uint8_t f = ctx.is_primitive(a) ? kPrimitive : 0;
      if (with_normal && normal(a)) f |= kNormal;
      flags_[a] = f;
    }
  }
  bool has(Handle a, ElementType t) const {
    const std::uint8_t f = flags_[a];
    switch (t) {
      case ElementType::primitive: return f & kPrimitive;
      case ElementType::normal: return f & kNormal;
      case ElementType::primitive_normal: return (f & (kPrimitive | kNormal)) == (kPrimitive | kNormal);
    }
    return false;
  }

 private:
  std::vector<std::uint8_t> flags_;
};

/// Exact count over the q points alpha(theta + x), by direct order tests.
inline std::uint64_t count_on_line(const CharacterSystem& sys, const LineSpec& line, ElementType type) {
  const TowerContext& ctx = sys.ctx();
  make_line(ctx, line.theta, line.alpha);
  const NormalityTest normal(sys);
  std::uint64_t n = 0;
  for (Handle x : ctx.subfield_q()) {
    const Handle y = ctx.mul(line.alpha, ctx.add(line.theta, x));
    const bool prim = ctx.mult_order(y) == ctx.group_order();
    bool ok = false;
    switch (type) {
      case ElementType::primitive: ok = prim; break;
      case ElementType::normal: ok = normal(y); break;
      case ElementType::primitive_normal: ok = prim && normal(y); break;
    }
    n += ok;
  }
  return n;
}

struct LowerBound {
  std::uint64_t q = 0;
  int m = 0;
  std::uint64_t group_order = 0;
  std::uint64_t W_N = 0;
  Rational eps_N;
  std::uint64_t W_xm1 = 0, W_g1 = 0;
  Rational eps_xm1, eps_g1;
  double sqrt_q = 0;
  double bracket = 0;  // q / eps(g1) - W(q^m - 1) W(x^m - 1) sqrt(q)
  double value = 0;
};

/// eps(q^m - 1) eps(x^m - 1) [q / eps((x^m - 1)/(x - 1)) - W(q^m - 1) W(x^m - 1) sqrt(q)],
/// with x^m - 1 factored over the F_q of `ctx` (any tower whose subfield has q elements).
inline LowerBound lower_bound_N(const TowerContext& ctx, int m, std::uint64_t seed = 0) {
  if (m < 2) throw Error(Errc::InvalidArgument, "m must exceed 1");
  LowerBound lb;
  lb.q = ctx.q();
  lb.m = m;
  std::uint64_t qm = 1;
  for (int i = 0; i < m; ++i) {
    if (qm > (std::uint64_t{1} << 63) / lb.q) throw Error(Errc::SizeExceeded, "q^m exceeds 2^63");
    qm *= lb.q;
  }
  lb.group_order = qm - 1;
  num::FactorOptions fo;
  fo.seed = seed;
  const auto nfac = num::factor_int(lb.group_order, fo);
  lb.W_N = num::squarefree_divisor_count(nfac);
  lb.eps_N = {num::euler_phi(nfac), lb.group_order};

  const PolyQ xm1 = x_pow_minus_one(ctx, m);
  const PolyQ g1 = xm1 / (PolyQ::monomial(&ctx, 1) - PolyQ::one(&ctx));
  const auto fx = factor_poly(xm1, seed);
  const auto fg = factor_poly(g1, seed);
  lb.W_xm1 = std::uint64_t{1} << fx.factors.size();
  lb.W_g1 = std::uint64_t{1} << fg.factors.size();
  if (lb.W_xm1 > (std::uint64_t{1} << m)) throw Error(Errc::ConsistencyFailure, "W(x^m - 1) exceeds 2^m");
  lb.eps_xm1 = {euler_phi_poly(fx), qm};
  lb.eps_g1 = {euler_phi_poly(fg), qm / lb.q};
  lb.sqrt_q = std::sqrt(static_cast<double>(lb.q));
  lb.bracket = static_cast<double>(lb.q) / lb.eps_g1.value() - static_cast<double>(lb.W_N * lb.W_xm1) * lb.sqrt_q;
  lb.value = lb.eps_N.value() * lb.eps_xm1.value() * lb.bracket;
  return lb;
}

/// Same bound from q alone. Over F_q, x^m - 1 = (x^{m'} - 1)^{p^k} with p not dividing m',
/// and each d | m' contributes phi(d) / ord_d(q) irreducible factors of degree ord_d(q).
inline LowerBound lower_bound_N(std::uint64_t q, int m, std::uint64_t seed = 0) {
  const auto pp = num::prime_power(q);
  if (!pp) throw Error(Errc::NonPrime, std::to_string(q) + " is not a prime power");
  if (m < 2) throw Error(Errc::InvalidArgument, "m must exceed 1");
  LowerBound lb;
  lb.q = q;
  lb.m = m;
  std::uint64_t qm = 1;
  for (int i = 0; i < m; ++i) {
    if (qm > (std::uint64_t{1} << 63) / q) throw Error(Errc::SizeExceeded, "q^m exceeds 2^63");
    qm *= q;
  }
  lb.group_order = qm - 1;
  num::FactorOptions fo;
  fo.seed = seed;
  const auto nfac = num::factor_int(lb.group_order, fo);
  lb.W_N = num::squarefree_divisor_count(nfac);
  lb.eps_N = {num::euler_phi(nfac), lb.group_order};

  std::uint64_t mp = static_cast<std::uint64_t>(m), pk = 1;
  while (mp % pp->first == 0) {
    mp /= pp->first;
    pk *= pp->first;
  }
  auto qpow = [&](std::uint64_t e) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < e; ++i) r *= q;
    return r;
  };
  std::uint64_t phi_xm1 = 1, phi_g1 = 1, nx = 0, ng = 0;
  for (std::uint64_t d : num::divisors(num::factor_int(mp))) {
    const std::uint64_t deg = d == 1 ? 1 : num::multiplicative_order_mod(q % d, d);
    const std::uint64_t count = num::euler_phi(num::factor_int(d)) / deg;
    // each factor P^{p^k} contributes (q^deg - 1) q^{deg (p^k - 1)}
    const std::uint64_t unit = (qpow(deg) - 1) * qpow(deg * (pk - 1));
    for (std::uint64_t i = 0; i < count; ++i) phi_xm1 *= unit;
    nx += count;
    // g1 = (x^m - 1)/(x - 1) keeps x - 1 with multiplicity p^k - 1
    if (d != 1) {
      for (std::uint64_t i = 0; i < count; ++i) phi_g1 *= unit;
      ng += count;
    } else if (pk > 1) {
      phi_g1 *= (q - 1) * qpow(pk - 2);
      ++ng;
    }
  }
  lb.W_xm1 = std::uint64_t{1} << nx;
  lb.W_g1 = std::uint64_t{1} << ng;
  if (nx > static_cast<std::uint64_t>(m)) throw Error(Errc::ConsistencyFailure, "W(x^m - 1) exceeds 2^m");
  lb.eps_xm1 = {phi_xm1, qm};
  lb.eps_g1 = {phi_g1, qm / q};
  lb.sqrt_q = std::sqrt(static_cast<double>(q));
  lb.bracket = static_cast<double>(q) / lb.eps_g1.value() - static_cast<double>(lb.W_N * lb.W_xm1) * lb.sqrt_q;
  lb.value = lb.eps_N.value() * lb.eps_xm1.value() * lb.bracket;
  return lb;
}

struct LowerBoundCheck {
  std::uint64_t count = 0;
  double bound = 0;
  bool holds = false;
};

inline LowerBoundCheck verify_lower_bound(const CharacterSystem& sys, const LineSpec& line, std::uint64_t seed = 0) {
  const TowerContext& ctx = sys.ctx();
  make_line(ctx, line.theta, line.alpha);
  if (!ctx.in_subfield(line.alpha)) throw Error(Errc::InvalidArgument, "the sieve bound needs alpha in F_q^*");
  const Handle at = ctx.mul(line.alpha, line.theta);
  if (!is_gfree_direct_index(sys, at, sys.index_g1()))
    throw Error(Errc::HypothesisFailed, "alpha * theta = " + std::to_string(at) + " is not (x^m - 1)/(x - 1)-free");
  LowerBoundCheck r;
  r.count = count_on_line(sys, line, ElementType::primitive_normal);
  r.bound = lower_bound_N(ctx, ctx.m(), seed).value;
  r.holds = static_cast<double>(r.count) >= r.bound;
  return r;
}

/// The full-strength sieve sum over one translate set theta0 + F_q, split as
/// S1 (d = 1, f | g1), S2 (d = 1, f not dividing g1), S3 (d > 1), where
/// g1 = (x^m - 1)/(x - 1) and only squarefree d, f contribute.
struct SieveDecomposition {
  Handle theta0 = 0;
  bool qualifies = false;  // theta0 is g1-free
  cplx S1, S2, S3;
  double expected_S1 = 0;  // q / eps(g1)
  double S2_bound = 0;     // (W(x^m - 1) - W(g1)) m sqrt(q)
  double S3_bound = 0;     // (W(q^m - 1) - 1) W(x^m - 1) m sqrt(q)
  double sieve_count = 0;  // eps(q^m - 1) eps(x^m - 1) (S1 + S2 + S3)
  std::uint64_t count = 0;
};

class SieveEvaluator {
 public:
  explicit SieveEvaluator(const CharacterSystem& sys) : sys_(sys), sub_(sys.ctx()) {
    const TowerContext& ctx = sys.ctx();
    const auto& nfac = ctx.group_order_factorization();
    const std::uint64_t n = ctx.group_order();
    for (std::uint64_t d : num::squarefree_divisors(nfac)) {
      if (d == 1) continue;
      const double w = static_cast<double>(num::mobius_of_divisor(nfac, d)) / static_cast<double>(num::euler_phi_of_divisor(nfac, d));
      for (const auto& chi : enumerate_mult_chars_of_order(ctx, d)) {
        js_.push_back(chi.j);
        jw_.push_back(w);
      }
    }
    const auto& lat = sys.lattice();
    fw_.assign(lat.all.size(), 0.0);
    for (std::size_t f : lat.squarefree) fw_[f] = static_cast<double>(lat.all[f].mu) / static_cast<double>(lat.all[f].phi);
    // Q[t] = sum_{x in F_q} psi_t(x)
    Q_.assign(sub_.q(), cplx{});
    for (std::size_t ti = 0; ti < sub_.q(); ++ti)
      for (std::size_t xi = 0; xi < sub_.q(); ++xi) Q_[ti] += sys.roots_p().at_reduced(sub_.trace(ti, xi));
    eps_N_ = epsilon_int(nfac, n).value();
    eps_xm1_ = varepsilon_poly(sys, lat.top()).value();
    const double eps_g1 = varepsilon_poly(sys, sys.index_g1()).value();
    const double mq = ctx.m() * std::sqrt(static_cast<double>(ctx.q()));
    const double W_xm1 = static_cast<double>(lat.W);
    const double W_g1 = static_cast<double>(std::uint64_t{1} << std::count_if(lat.all[sys.index_g1()].exps.begin(), lat.all[sys.index_g1()].exps.end(), [](int e) { return e > 0; }));
    expected_S1_ = static_cast<double>(ctx.q()) / eps_g1;
    S2_bound_ = (W_xm1 - W_g1) * mq;
    S3_bound_ = (static_cast<double>(num::squarefree_divisor_count(nfac)) - 1) * W_xm1 * mq;
  }

  SieveDecomposition evaluate(Handle theta0, const TypeBitmap& types) const {
    const CharacterSystem& sys = sys_;
    const TowerContext& ctx = sys.ctx();
    const auto& lat = sys.lattice();
    const std::size_t q = sub_.q();
    SieveDecomposition r;
    r.theta0 = theta0;
    r.qualifies = is_gfree_direct_index(sys, theta0, sys.index_g1());
    r.expected_S1 = expected_S1_;
    r.S2_bound = S2_bound_;
    r.S3_bound = S3_bound_;

    // A[f][t] = sum over c of squarefree F_q-order f with Tr(c) = t of psi_c(theta0)
    std::vector<cplx> A(lat.all.size() * q);
    for (Handle c = 0; c < ctx.size(); ++c) {
      const std::size_t f = sys.add_char_order_index(c);
      if (!lat.all[f].squarefree) continue;
      A[f * q + sub_.pos(ctx.trace_to_subfield(c))] += sys.psi(c, theta0);
    }
    std::vector<cplx> B(q);
    for (std::size_t f : lat.squarefree) {
      cplx part{};
      for (std::size_t t = 0; t < q; ++t) {
        part += A[f * q + t] * Q_[t];
        B[t] += fw_[f] * A[f * q + t];
      }
      (lat.divides(f, sys.index_g1()) ? r.S1 : r.S2) += fw_[f] * part;
    }
    if (!js_.empty()) {
      const MixedSumTable tab(sys, sub_, theta0, js_);
      for (std::size_t k = 0; k < js_.size(); ++k) {
        cplx inner{};
        for (std::size_t t = 0; t < q; ++t) inner += B[t] * tab.value(k, t);
        r.S3 += jw_[k] * inner;
      }
    }
    r.sieve_count = eps_N_ * eps_xm1_ * (r.S1 + r.S2 + r.S3).real();
    for (Handle x : ctx.subfield_q()) r.count += types.has(ctx.add(theta0, x), ElementType::primitive_normal);
    return r;
  }

 private:
  const CharacterSystem& sys_;
  SubfieldTables sub_;
  std::vector<std::uint64_t> js_;
  std::vector<double> jw_;
  std::vector<double> fw_;
  std::vector<cplx> Q_;
  double eps_N_ = 0, eps_xm1_ = 0, expected_S1_ = 0, S2_bound_ = 0, S3_bound_ = 0;
};

/// Smallest handle of each translate set theta + F_q with theta a generator.
inline std::vector<Handle> translate_class_reps(const TowerContext& ctx) {
  std::vector<std::uint8_t> seen(ctx.size(), 0);
  std::vector<Handle> reps;
  for (Handle t = 0; t < ctx.size(); ++t) {
    if (seen[t] || !ctx.is_extension_generator(t)) continue;
    reps.push_back(t);
    for (Handle x : ctx.subfield_q()) seen[ctx.add(t, x)] = 1;
  }
  return reps;
}

inline Handle translate_class_rep_of(const TowerContext& ctx, Handle t) {
  Handle best = t;
  for (Handle x : ctx.subfield_q()) best = std::min(best, ctx.add(t, x));
  return best;
}

/// Smallest handle of each direction class alpha F_q^*.
inline std::vector<Handle> direction_reps(const TowerContext& ctx) {
  std::vector<std::uint8_t> seen(ctx.size(), 0);
  std::vector<Handle> reps;
  for (Handle a = 1; a < ctx.size(); ++a) {
    if (seen[a]) continue;
    reps.push_back(a);
    for (Handle c : ctx.subfield_q())
      if (c) seen[ctx.mul(a, c)] = 1;
  }
  return reps;
}

struct PropertyResult {
  bool passed = true;
  std::optional<LineSpec> witness;
  std::uint64_t lines_checked = 0;
};

/// Decides TP, WLP or LP for one tower and element type. WLP iterates
/// alpha in F_q^* and skips lines whose point set was already checked; LP
/// runs over canonical (direction class, translate class) pairs.
inline PropertyResult property_check(const CharacterSystem& sys, LineProperty prop, ElementType type) {
  const TowerContext& ctx = sys.ctx();
  const TypeBitmap types(sys, type != ElementType::primitive);
  const std::vector<Handle> classes = translate_class_reps(ctx);
  PropertyResult r;
  auto line_ok = [&](Handle theta, Handle alpha) {
    ++r.lines_checked;
    for (Handle x : ctx.subfield_q())
      if (types.has(ctx.mul(alpha, ctx.add(theta, x)), type)) return true;
    return false;
  };
  auto fail = [&](Handle theta, Handle alpha) {
    const LineSpec w = make_line(ctx, theta, alpha);
    if (count_on_line(sys, w, type) != 0) throw Error(Errc::ConsistencyFailure, "failure witness does not re-verify");
    r.passed = false;
    r.witness = w;
  };
  switch (prop) {
    case LineProperty::tp:
      for (Handle t : classes)
        if (!line_ok(t, 1)) {
          fail(t, 1);
          return r;
        }
      break;
    case LineProperty::wlp: {
      std::vector<std::uint8_t> done(ctx.size(), 0);
      for (Handle a : ctx.subfield_q()) {
        if (a == 0) continue;
        for (Handle t : classes) {
          const Handle key = translate_class_rep_of(ctx, ctx.mul(a, t));
          if (done[key]) continue;
          done[key] = 1;
          if (!line_ok(t, a)) {
            fail(t, a);
            return r;
          }
        }
      }
      break;
    }
    case LineProperty::lp: {
      const std::uint64_t n = ctx.group_order();
      std::vector<std::uint8_t> primlog;
      if (type == ElementType::primitive) {
        primlog.assign(n, 0);
        for (std::uint64_t k = 0; k < n; ++k) primlog[k] = std::gcd(k, n) == 1;
      }
      std::vector<std::vector<std::uint32_t>> logs;
      if (type == ElementType::primitive) {
        logs.resize(classes.size());
        for (std::size_t i = 0; i < classes.size(); ++i)
          for (Handle x : ctx.subfield_q()) logs[i].push_back(ctx.log(ctx.add(classes[i], x)));
      }
      for (Handle a : direction_reps(ctx)) {
        const std::uint64_t la = ctx.log(a);
        for (std::size_t i = 0; i < classes.size(); ++i) {
          bool ok;
          if (type == ElementType::primitive) {
            ++r.lines_checked;
            ok = false;
            for (std::uint32_t l : logs[i]) {
              std::uint64_t k = la + l;
              if (k >= n) k -= n;
              if (primlog[k]) {
                ok = true;
                break;
              }
            }
          } else {
            ok = line_ok(classes[i], a);
          }
          if (!ok) {
            fail(classes[i], a);
            return r;
          }
        }
      }
      break;
    }
  }
  return r;
}

struct ScanEntry {
  std::uint64_t q = 0;
  bool scanned = false;
  std::string skip_reason;
  bool primitive_residue = false;  // q primitive modulo m (m prime)
  bool within_hypothesis = true;
  bool passed = true;
  std::optional<LineSpec> witness;
  std::uint64_t lines_checked = 0;
  double lower_bound = 0;
};

struct ScanReport {
  int m = 0;
  LineProperty property = LineProperty::tp;
  ElementType type = ElementType::primitive;
  std::uint64_t scan_limit = 0;
  bool require_primitive_residue = false;
  bool truncated = false;  // stopped at the size cap
  std::uint64_t reached_q = 0;
  std::vector<ScanEntry> entries;

  std::vector<std::uint64_t> q_list() const {
    std::vector<std::uint64_t> v;
    for (const auto& e : entries)
      if (e.scanned) v.push_back(e.q);
    return v;
  }
  std::vector<const ScanEntry*> failures() const {
    std::vector<const ScanEntry*> v;
    for (const auto& e : entries)
      if (e.scanned && !e.passed) v.push_back(&e);
    return v;
  }
  /// Largest failing q among all scanned q.
  std::optional<std::uint64_t> largest_failing_q() const {
    std::optional<std::uint64_t> r;
    for (const auto* e : failures()) r = e->q;
    return r;
  }
  /// Largest failing q among scanned q satisfying the primitive-residue hypothesis.
  std::optional<std::uint64_t> largest_failing_q_within_hypothesis() const {
    std::optional<std::uint64_t> r;
    for (const auto* e : failures())
      if (e->within_hypothesis) r = e->q;
    return r;
  }
};

struct ScanOptions {
  bool require_primitive_residue = false;
  std::vector<std::uint64_t> residues;  // keep only q with q mod m in this list (empty: all)
  std::uint64_t seed = 0;
  std::uint64_t size_cap = std::uint64_t{1} << 22;
  unsigned threads = 1;
};

/// Scans every prime power q <= q_max in increasing order. The primitive-residue
/// hypothesis applies to primitive-normal WLP scans with m prime; q outside it
/// are still checked and labelled unless require_primitive_residue skips them.
inline ScanReport scan_constants(int m, std::uint64_t q_max, LineProperty prop, ElementType type, const ScanOptions& opt = {}) {
  ScanReport rep;
  rep.m = m;
  rep.property = prop;
  rep.type = type;
  rep.scan_limit = q_max;
  rep.require_primitive_residue = opt.require_primitive_residue;
  const bool hypothesis_applies = prop == LineProperty::wlp && type == ElementType::primitive_normal;
  const bool m_prime = num::is_prime(static_cast<std::uint64_t>(m));
  for (std::uint64_t q : num::prime_powers_up_to(q_max)) {
    ScanEntry e;
    e.q = q;
    e.primitive_residue = m_prime && num::is_primitive_mod(q, static_cast<std::uint64_t>(m));
    e.within_hypothesis = !hypothesis_applies || !m_prime || e.primitive_residue;
    if (!opt.residues.empty() && std::find(opt.residues.begin(), opt.residues.end(), q % m) == opt.residues.end()) {
      e.skip_reason = "residue filter";
    } else if (opt.require_primitive_residue && hypothesis_applies && !e.within_hypothesis) {
      e.skip_reason = "q not primitive modulo m";
    }
    std::uint64_t size = 1;
    bool too_big = false;
    for (int i = 0; i < m; ++i) {
      if (size > opt.size_cap / q) too_big = true;
      size *= q;
    }
    if (too_big || size > opt.size_cap) {
      rep.truncated = true;
      break;
    }
    rep.entries.push_back(e);
  }
  parallel_for(rep.entries.size(), opt.threads, [&](std::size_t i) {
    ScanEntry& e = rep.entries[i];
    if (!e.skip_reason.empty()) return;
    const auto pp = num::prime_power(e.q);
    TowerOptions to;
    to.seed = opt.seed;
    to.size_cap = opt.size_cap;
    const CharacterSystem sys(build_tower(pp->first, pp->second, m, to), opt.seed);
    const PropertyResult r = property_check(sys, prop, type);
    e.scanned = true;
    e.passed = r.passed;
    e.witness = r.witness;
    e.lines_checked = r.lines_checked;
    e.lower_bound = lower_bound_N(sys.ctx(), m, opt.seed).value;
  });
  for (const auto& e : rep.entries)
    if (e.scanned) rep.reached_q = e.q;
  return rep;
}

}  // namespace charfield
