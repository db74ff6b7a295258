#pragma once

// Incomplete mixed sums S(theta, chi, psi) = sum_{x in F_q} chi(theta + x) psi(x),
// bound verification sweeps, and the rational-argument sums with degrees D1..D4.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "charfield/characters.hpp"
#include "charfield/error.hpp"
#include "charfield/ff_core.hpp"
#include "charfield/parallel.hpp"
#include "charfield/polyring.hpp"

namespace charfield {

inline constexpr double kBoundTolerance = 1e-6;

enum class BoundKind { main, katz, fuwan, none };

inline const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::main: return "main";
    case BoundKind::katz: return "katz";
    case BoundKind::fuwan: return "fuwan";
    case BoundKind::none: return "none";
  }
  return "none";
}

inline BoundKind parse_bound_kind(const std::string& s) {
  if (s == "main") return BoundKind::main;
  if (s == "katz") return BoundKind::katz;
  if (s == "fuwan") return BoundKind::fuwan;
  if (s == "none") return BoundKind::none;
  throw Error(Errc::InvalidArgument, "unknown bound kind " + s);
}

struct SumRecord {
  std::uint64_t q = 0;
  int m = 0;
  Handle theta = 0;
  std::uint64_t chi_index = 0;
  Handle psi_param = 0;
  cplx value;
  double modulus = 0;
  std::optional<double> bound;  // absent when both characters are trivial
  std::optional<double> slack;  // bound - modulus
  BoundKind bound_kind = BoundKind::none;

  // Only meaningful for bound_kind == fuwan.
  std::array<int, 4> D{0, 0, 0, 0};
  bool degenerate_or_bug = false;

  bool violates(double tol = kBoundTolerance) const { return slack && *slack < -tol; }
  bool operator<(const SumRecord& o) const {
    if (theta != o.theta) return theta < o.theta;
    if (chi_index != o.chi_index) return chi_index < o.chi_index;
    return psi_param < o.psi_param;
  }
};

inline SumRecord make_record(const TowerContext& ctx, Handle theta, std::uint64_t j, Handle b, cplx value,
                             std::optional<double> bound, BoundKind kind) {
  SumRecord r;
  r.q = ctx.q();
  r.m = ctx.m();
  r.theta = theta;
  r.chi_index = j;
  r.psi_param = b;
  r.value = value;
  r.modulus = std::abs(value);
  r.bound = bound;
  r.bound_kind = bound ? kind : BoundKind::none;
  if (bound) r.slack = *bound - r.modulus;
  return r;
}

/// m sqrt(q) for psi nontrivial, (m - 1) sqrt(q) for psi trivial and chi
/// nontrivial, nothing when both are trivial.
inline std::pair<std::optional<double>, BoundKind> mixed_bound(const TowerContext& ctx, std::uint64_t j, Handle b) {
  const double sq = std::sqrt(static_cast<double>(ctx.q()));
  if (b != 0) return {ctx.m() * sq, BoundKind::main};
  if (j != 0) return {(ctx.m() - 1) * sq, BoundKind::katz};
  return {std::nullopt, BoundKind::none};
}

/// Subfield enumeration with a handle -> position map and the q x q table of
/// Tr_{q/p}(b x).
class SubfieldTables {
 public:
  explicit SubfieldTables(const TowerContext& ctx) : elems_(ctx.subfield_q()), pos_(ctx.size(), -1) {
    const std::size_t q = elems_.size();
    for (std::size_t i = 0; i < q; ++i) pos_[elems_[i]] = static_cast<std::int32_t>(i);
    trace_.resize(q * q);
    for (std::size_t bi = 0; bi < q; ++bi)
      for (std::size_t xi = 0; xi < q; ++xi) trace_[bi * q + xi] = ctx.subfield_trace_to_prime(ctx.mul(elems_[bi], elems_[xi]));
  }
  std::size_t q() const { return elems_.size(); }
  const std::vector<Handle>& elems() const { return elems_; }
  Handle at(std::size_t i) const { return elems_[i]; }
  std::int32_t pos(Handle h) const { return pos_[h]; }
  /// Tr_{q/p}(b x) by positions.
  std::uint32_t trace(std::size_t bi, std::size_t xi) const { return trace_[bi * elems_.size() + xi]; }

 private:
  std::vector<Handle> elems_;
  std::vector<std::int32_t> pos_;
  std::vector<std::uint32_t> trace_;
};

/// S(theta, chi_j, psi_b) for the requested j and every b in F_q.
/// Row-major: value(r, bi) is the sum for js[r] and b = F_q[bi].
class MixedSumTable {
 public:
  MixedSumTable(const CharacterSystem& sys, const SubfieldTables& sub, Handle theta, const std::vector<std::uint64_t>& js)
      : q_(sub.q()), js_(js), v_(js.size() * sub.q()) {
    const TowerContext& ctx = sys.ctx();
    const std::uint64_t n = ctx.group_order();
    std::vector<std::uint64_t> L(q_);
    for (std::size_t xi = 0; xi < q_; ++xi) L[xi] = ctx.log(ctx.add(theta, sub.at(xi)));
    std::vector<cplx> u(q_), byres(sys.roots_p().n());
    const std::size_t p = sys.roots_p().n();
    for (std::size_t r = 0; r < js.size(); ++r) {
      const std::uint64_t j = js[r];
      for (std::size_t xi = 0; xi < q_; ++xi) u[xi] = sys.roots_n().at_reduced(num::mulmod(j, L[xi], n));
      for (std::size_t bi = 0; bi < q_; ++bi) {
        std::fill(byres.begin(), byres.end(), cplx{});
        for (std::size_t xi = 0; xi < q_; ++xi) byres[sub.trace(bi, xi)] += u[xi];
        cplx acc{};
        for (std::size_t k = 0; k < p; ++k) acc += byres[k] * sys.roots_p().at_reduced(k);
        v_[r * q_ + bi] = acc;
      }
    }
  }
  const cplx& value(std::size_t r, std::size_t bi) const { return v_[r * q_ + bi]; }
  const std::vector<std::uint64_t>& js() const { return js_; }

 private:
  std::size_t q_;
  std::vector<std::uint64_t> js_;
  std::vector<cplx> v_;
};

inline void require_generator(const TowerContext& ctx, Handle theta) {
  if (theta >= ctx.size() || !ctx.is_extension_generator(theta))
    throw Error(Errc::NotAGenerator, "element " + std::to_string(theta) + " does not generate F_{q^m} over F_q");
}

/// Direct term-by-term evaluation of one mixed sum.
inline SumRecord mixed_sum(const CharacterSystem& sys, Handle theta, std::uint64_t j, Handle b) {
  const TowerContext& ctx = sys.ctx();
  require_generator(ctx, theta);
  make_mult_char(ctx, j);
  make_subfield_add_char(ctx, b);
  cplx acc{};
  for (Handle x : ctx.subfield_q()) acc += sys.chi(j, ctx.add(theta, x)) * sys.psi_sub(b, x);
  auto [bound, kind] = mixed_bound(ctx, j, b);
  return make_record(ctx, theta, j, b, acc, bound, kind);
}

struct KindSummary {
  std::uint64_t records = 0;
  std::uint64_t violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_ratio = 0;  // modulus / sqrt(q)
};

struct SweepWitness {
  Handle theta = 0;
  std::uint64_t chi_index = 0;
  Handle psi_param = 0;
  double modulus = 0;
  double slack = std::numeric_limits<double>::infinity();
};

struct SweepSummary {
  std::uint64_t q = 0;
  int m = 0;
  std::uint64_t thetas = 0;            // generators covered
  std::uint64_t thetas_evaluated = 0;  // generators whose sums were computed directly
  std::uint64_t records = 0;           // (theta, chi, psi) triples covered
  std::uint64_t violations = 0;
  bool orbit_reduced = false;
  std::uint64_t spot_checks = 0;
  double spot_check_max_error = 0;
  SweepWitness argmin;
  double max_ratio = 0;
  KindSummary main, katz;
  std::uint64_t unbounded = 0;  // both characters trivial

  double min_slack() const { return argmin.slack; }
};

enum class ThetaMode { all, sample };
enum class OrbitMode { automatic, never, always };

struct SweepOptions {
  ThetaMode theta_mode = ThetaMode::all;
  std::size_t sample_k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> chi_orders;  // empty: every character
  bool psi_trivial_only = false;
  unsigned threads = 1;
  OrbitMode orbit = OrbitMode::automatic;
  double direct_budget = 1e8;  // term count above which automatic mode reduces by orbits
  std::size_t spot_checks = 12;
  double tolerance = kBoundTolerance;
  std::function<void(const SumRecord&)> sink;  // receives every record in sorted order
};

inline std::vector<std::uint64_t> select_chi_indices(const TowerContext& ctx, const std::vector<std::uint64_t>& orders) {
  const std::uint64_t n = ctx.group_order();
  std::vector<std::uint64_t> js;
  for (std::uint64_t j = 0; j < n; ++j) {
    if (orders.empty()) {
      js.push_back(j);
      continue;
    }
    const std::uint64_t d = n / std::gcd(j, n);
    for (auto o : orders)
      if (o == d) {
        js.push_back(j);
        break;
      }
  }
  return js;
}

/// k generators drawn without replacement from raw 64-bit generator output, ascending.
inline std::vector<Handle> sample_generators(const std::vector<Handle>& gens, std::size_t k, std::uint64_t seed) {
  std::vector<Handle> v = gens;
  if (k >= v.size()) return v;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(v[i], v[i + rng() % (v.size() - i)]);
  v.resize(k);
  std::sort(v.begin(), v.end());
  return v;
}

namespace detail {

struct OrbitMap {
  std::vector<Handle> reps;
  std::vector<std::int32_t> rep_index;  // per handle, -1 if not a generator in the selection
  std::vector<Handle> c, u;             // theta = c * rep + u
};

// Orbits of theta -> c theta + u (c in F_q^*, u in F_q) on the generators.
// Every orbit has exactly q(q - 1) elements; its representative is the
// smallest handle.
inline OrbitMap affine_orbits(const TowerContext& ctx, const std::vector<Handle>& gens) {
  OrbitMap om;
  om.rep_index.assign(ctx.size(), -1);
  om.c.assign(ctx.size(), 0);
  om.u.assign(ctx.size(), 0);
  for (Handle g : gens) {
    if (om.rep_index[g] >= 0) continue;
    const auto idx = static_cast<std::int32_t>(om.reps.size());
    om.reps.push_back(g);
    for (Handle c : ctx.subfield_q()) {
      if (c == 0) continue;
      const Handle cg = ctx.mul(c, g);
      for (Handle u : ctx.subfield_q()) {
        const Handle t = ctx.add(cg, u);
        om.rep_index[t] = idx;
        om.c[t] = c;
        om.u[t] = u;
      }
    }
  }
  return om;
}

inline void accumulate(SweepSummary& s, const SumRecord& r, std::uint64_t weight, double sqrt_q, double tol) {
  s.records += weight;
  if (r.bound_kind == BoundKind::none) {
    s.unbounded += weight;
    return;
  }
  KindSummary& k = r.bound_kind == BoundKind::main ? s.main : s.katz;
  k.records += weight;
  const double ratio = r.modulus / sqrt_q;
  k.max_ratio = std::max(k.max_ratio, ratio);
  s.max_ratio = std::max(s.max_ratio, ratio);
  if (r.violates(tol)) {
    k.violations += weight;
    s.violations += weight;
  }
  k.min_slack = std::min(k.min_slack, *r.slack);
  if (*r.slack < s.argmin.slack) s.argmin = {r.theta, r.chi_index, r.psi_param, r.modulus, *r.slack};
}

inline void merge_kind(KindSummary& a, const KindSummary& b) {
  a.records += b.records;
  a.violations += b.violations;
  a.min_slack = std::min(a.min_slack, b.min_slack);
  a.max_ratio = std::max(a.max_ratio, b.max_ratio);
}

// Merges b (later thetas) into a; ties keep the earlier witness.
inline void merge(SweepSummary& a, const SweepSummary& b) {
  a.records += b.records;
  a.violations += b.violations;
  a.unbounded += b.unbounded;
  a.thetas += b.thetas;
  a.thetas_evaluated += b.thetas_evaluated;
  a.max_ratio = std::max(a.max_ratio, b.max_ratio);
  merge_kind(a.main, b.main);
  merge_kind(a.katz, b.katz);
  if (b.argmin.slack < a.argmin.slack) a.argmin = b.argmin;
}

}  // namespace detail

/// Sweeps mixed sums over the selected generators and characters.
/// In orbit-reduced mode only orbit representatives are evaluated; every other
/// generator theta = c theta0 + u is covered by the exact identity
/// S(c theta0 + u, chi, psi_b) = chi(c) psi_b(-u) S(theta0, chi, psi_{bc}),
/// which preserves moduli and bound kinds. Seeded non-representatives are
/// recomputed directly and compared against the identity.
inline SweepSummary verify_bounds_sweep(const CharacterSystem& sys, const SweepOptions& opt = {}) {
  const TowerContext& ctx = sys.ctx();
  const SubfieldTables sub(ctx);
  const double sqrt_q = std::sqrt(static_cast<double>(ctx.q()));
  const std::vector<Handle> all_gens = ctx.extension_generators();
  const std::vector<Handle> gens =
      opt.theta_mode == ThetaMode::all ? all_gens : sample_generators(all_gens, opt.sample_k, opt.seed);
  const std::vector<std::uint64_t> js = select_chi_indices(ctx, opt.chi_orders);
  std::vector<std::size_t> bis;
  for (std::size_t bi = 0; bi < sub.q(); ++bi)
    if (!opt.psi_trivial_only || sub.at(bi) == 0) bis.push_back(bi);

  const double direct_terms = static_cast<double>(gens.size()) * js.size() * sub.q() * sub.q();
  const bool orbit = opt.theta_mode == ThetaMode::all &&
                     (opt.orbit == OrbitMode::always || (opt.orbit == OrbitMode::automatic && direct_terms > opt.direct_budget));

  SweepSummary total;
  total.q = ctx.q();
  total.m = ctx.m();
  total.orbit_reduced = orbit;

  auto records_for = [&](Handle theta, const MixedSumTable& tab, auto&& emit) {
    for (std::size_t r = 0; r < js.size(); ++r)
      for (std::size_t bi : bis) {
        auto [bound, kind] = mixed_bound(ctx, js[r], sub.at(bi));
        emit(make_record(ctx, theta, js[r], sub.at(bi), tab.value(r, bi), bound, kind));
      }
  };

  if (!orbit) {
    std::vector<SweepSummary> parts(gens.size());
    std::vector<std::vector<SumRecord>> recs(opt.sink ? gens.size() : 0);
    parallel_for(gens.size(), opt.threads, [&](std::size_t i) {
      MixedSumTable tab(sys, sub, gens[i], js);
      SweepSummary& s = parts[i];
      s.thetas = s.thetas_evaluated = 1;
      records_for(gens[i], tab, [&](SumRecord&& rec) {
        detail::accumulate(s, rec, 1, sqrt_q, opt.tolerance);
        if (opt.sink) recs[i].push_back(std::move(rec));
      });
    });
    for (std::size_t i = 0; i < gens.size(); ++i) {
      detail::merge(total, parts[i]);
      if (opt.sink)
        for (const auto& r : recs[i]) opt.sink(r);
    }
    return total;
  }

  const detail::OrbitMap om = detail::affine_orbits(ctx, gens);
  const std::uint64_t orbit_size = ctx.q() * (ctx.q() - 1);
  std::vector<SweepSummary> parts(om.reps.size());
  std::vector<std::unique_ptr<MixedSumTable>> tables(om.reps.size());
  parallel_for(om.reps.size(), opt.threads, [&](std::size_t i) {
    auto tab = std::make_unique<MixedSumTable>(sys, sub, om.reps[i], js);
    SweepSummary& s = parts[i];
    s.thetas = orbit_size;
    s.thetas_evaluated = 1;
    records_for(om.reps[i], *tab, [&](SumRecord&& rec) { detail::accumulate(s, rec, orbit_size, sqrt_q, opt.tolerance); });
    tables[i] = std::move(tab);
  });
  for (const auto& p : parts) detail::merge(total, p);

  // Position of each selected j, for the identity's chi(c) factor.
  auto derived = [&](Handle theta, std::size_t r, std::size_t bi) {
    const std::int32_t ri = om.rep_index[theta];
    const Handle c = om.c[theta], u = om.u[theta];
    const Handle b = sub.at(bi);
    const std::size_t bci = static_cast<std::size_t>(sub.pos(ctx.mul(b, c)));
    return sys.chi(js[r], c) * sys.psi_sub(b, ctx.neg(u)) * tables[ri]->value(r, bci);
  };

  std::mt19937_64 rng(opt.seed ^ 0x5eedULL);
  std::vector<Handle> non_reps;
  for (Handle g : gens)
    if (om.reps[om.rep_index[g]] != g) non_reps.push_back(g);
  for (std::size_t k = 0; k < opt.spot_checks && !non_reps.empty(); ++k) {
    const Handle theta = non_reps[rng() % non_reps.size()];
    MixedSumTable direct(sys, sub, theta, js);
    for (std::size_t r = 0; r < js.size(); ++r)
      for (std::size_t bi : bis) total.spot_check_max_error = std::max(total.spot_check_max_error, std::abs(direct.value(r, bi) - derived(theta, r, bi)));
    ++total.spot_checks;
  }
  if (total.spot_check_max_error > 1e-9)
    throw Error(Errc::ConsistencyFailure, "orbit identity mismatch " + std::to_string(total.spot_check_max_error));

  if (opt.sink) {
    for (Handle theta : gens)
      for (std::size_t r = 0; r < js.size(); ++r)
        for (std::size_t bi : bis) {
          auto [bound, kind] = mixed_bound(ctx, js[r], sub.at(bi));
          opt.sink(make_record(ctx, theta, js[r], sub.at(bi), derived(theta, r, bi), bound, kind));
        }
  }
  return total;
}

/// Rational function over F_{q^m} in lowest terms with monic denominator.
struct RationalE {
  PolyE num, den;

  static RationalE make(const PolyE& n, const PolyE& d) {
    if (d.is_zero()) throw Error(Errc::DivisionByZero, "zero denominator");
    RationalE r;
    if (n.is_zero()) {
      r.num = n;
      r.den = PolyE::one(d.context());
      return r;
    }
    const PolyE g = gcd(n, d);
    r.num = n / g;
    r.den = d / g;
    const Handle li = d.context()->inv(r.den.lead());
    r.num = r.num.scaled(li);
    r.den = r.den.scaled(li);
    return r;
  }
  bool is_zero() const { return num.is_zero(); }
  bool is_constant() const { return num.degree() <= 0 && den.degree() == 0; }
  /// deg num - deg den; meaningless for the zero function.
  int degree() const { return num.degree() - den.degree(); }
};

struct FuWanDegrees {
  int D1 = 0, D2 = 0, D3 = 0, D4 = 0;
};

/// D1 = max(deg num f, deg den f); D2 = max(deg g, 0); D3 = deg den g;
/// D4 = degree of the part of den g coprime to num f and den f.
inline FuWanDegrees fuwan_degrees(const RationalE& f, const RationalE& g) {
  FuWanDegrees d;
  d.D1 = std::max(f.num.degree(), f.den.degree());
  d.D2 = g.is_zero() ? 0 : std::max(g.degree(), 0);
  d.D3 = g.den.degree();
  const PolyE nf = f.num * f.den;
  PolyE r = g.den;
  for (PolyE h = gcd(r, nf); h.degree() > 0; h = gcd(r, nf)) r = r / h;
  d.D4 = r.degree();
  return d;
}

/// sum over t in F_q with f(t) != 0, inf and g(t) != inf of
/// chi(f(t)) psi_b(Tr_{q^m/q}(g(t))), with (m(D1 + D3 + D4) + D2 - 1) sqrt(q)
/// attached unless both characters are effectively trivial. Exceeding the
/// bound sets degenerate_or_bug.
inline SumRecord fuwan_sum(const CharacterSystem& sys, const RationalE& f, const RationalE& g, std::uint64_t j, Handle b,
                           double tol = kBoundTolerance) {
  const TowerContext& ctx = sys.ctx();
  make_mult_char(ctx, j);
  make_subfield_add_char(ctx, b);
  if (f.is_zero()) throw Error(Errc::UndefinedEverywhere, "f is identically zero");
  cplx acc{};
  std::size_t terms = 0;
  for (Handle t : ctx.subfield_q()) {
    const Handle fd = f.den.eval(t), fn = f.num.eval(t), gd = g.den.eval(t);
    if (fd == 0 || fn == 0 || gd == 0) continue;
    const Handle ft = ctx.div(fn, fd), gt = ctx.div(g.num.eval(t), gd);
    acc += sys.chi(j, ft) * sys.psi_sub(b, ctx.trace_to_subfield(gt));
    ++terms;
  }
  if (terms == 0) throw Error(Errc::UndefinedEverywhere, "no t in F_q where f and g are defined and f is nonzero");
  const FuWanDegrees d = fuwan_degrees(f, g);
  const bool additive_trivial = b == 0 || g.is_constant() || g.is_zero();
  std::optional<double> bound;
  if (!(j == 0 && additive_trivial))
    bound = (ctx.m() * (d.D1 + d.D3 + d.D4) + d.D2 - 1) * std::sqrt(static_cast<double>(ctx.q()));
  SumRecord r = make_record(ctx, 0, j, b, acc, bound, BoundKind::fuwan);
  r.D = {d.D1, d.D2, d.D3, d.D4};
  r.degenerate_or_bug = r.violates(tol);
  return r;
}

}  // namespace charfield
