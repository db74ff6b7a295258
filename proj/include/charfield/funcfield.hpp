#pragma once

// The rational function field F_q(x): places, valuations, divisors and the
// character X modulo I = p_g p_inf^2 attached to (theta, chi, psi).

#include <climits>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "charfield/characters.hpp"
#include "charfield/charsum.hpp"
#include "charfield/error.hpp"
#include "charfield/ff_core.hpp"
#include "charfield/polyring.hpp"

namespace charfield {

inline constexpr int kValuationInfinity = INT_MAX;

/// A finite place p_pi (pi monic irreducible) or the infinite place.
struct Place {
  bool infinite = false;
  PolyQ pi;

  int degree() const { return infinite ? 1 : pi.degree(); }
  bool operator==(const Place& o) const { return infinite == o.infinite && (infinite || pi == o.pi); }
  bool operator<(const Place& o) const {
    if (infinite != o.infinite) return !infinite;
    return !infinite && pi < o.pi;
  }
  std::string to_string() const { return infinite ? "inf" : "[" + pi.to_string() + "]"; }
};

inline Place finite_place(const PolyQ& pi) {
  if (!pi.is_monic() || !is_irreducible(pi)) throw Error(Errc::InvalidArgument, pi.to_string() + " is not monic irreducible");
  return {false, pi};
}

inline Place infinite_place() { return {true, PolyQ{}}; }

/// Element of the free abelian group on places; zero exponents are never stored.
class Divisor {
 public:
  Divisor() = default;
  static Divisor of(const Place& p, int e = 1) {
    Divisor d;
    d.add(p, e);
    return d;
  }

  void add(const Place& p, int e) {
    if (e == 0) return;
    int& v = e_[p];
    v += e;
    if (v == 0) e_.erase(p);
  }
  int exponent(const Place& p) const {
    auto it = e_.find(p);
    return it == e_.end() ? 0 : it->second;
  }
  const std::map<Place, int>& exponents() const { return e_; }
  bool is_unit() const { return e_.empty(); }
  bool is_integral() const {
    for (const auto& [p, e] : e_)
      if (e < 0) return false;
    return true;
  }
  long degree() const {
    long d = 0;
    for (const auto& [p, e] : e_) d += static_cast<long>(e) * p.degree();
    return d;
  }
  Divisor operator*(const Divisor& o) const {
    Divisor r = *this;
    for (const auto& [p, e] : o.e_) r.add(p, e);
    return r;
  }
  Divisor inverse() const {
    Divisor r;
    for (const auto& [p, e] : e_) r.e_[p] = -e;
    return r;
  }
  Divisor operator/(const Divisor& o) const { return *this * o.inverse(); }
  bool operator==(const Divisor& o) const { return e_ == o.e_; }
  /// True when no place of `o` appears here.
  bool coprime_to(const Divisor& o) const {
    for (const auto& [p, e] : o.e_)
      if (e_.count(p)) return false;
    return true;
  }
  std::string to_string() const {
    std::string s;
    for (const auto& [p, e] : e_) s += (s.empty() ? "" : " ") + p.to_string() + "^" + std::to_string(e);
    return s.empty() ? "1" : s;
  }

 private:
  std::map<Place, int> e_;
};

/// Element of F_q(x) in lowest terms with monic denominator.
struct RationalQ {
  PolyQ num, den;

  static RationalQ make(const PolyQ& n, const PolyQ& d) {
    if (d.is_zero()) throw Error(Errc::DivisionByZero, "zero denominator");
    RationalQ r;
    if (n.is_zero()) {
      r.num = n;
      r.den = PolyQ::one(d.context());
      return r;
    }
    const PolyQ g = gcd(n, d);
    r.num = n / g;
    r.den = d / g;
    const Handle li = d.context()->inv(r.den.lead());
    r.num = r.num.scaled(li);
    r.den = r.den.scaled(li);
    return r;
  }
  bool is_zero() const { return num.is_zero(); }
};

namespace detail {
inline int multiplicity(PolyQ f, const PolyQ& pi) {
  int k = 0;
  for (;;) {
    auto [quo, rem] = divmod(f, pi);
    if (!rem.is_zero()) return k;
    f = quo;
    ++k;
  }
}
}  // namespace detail

/// nu_pi(r) = multiplicity in num - multiplicity in den; nu_inf(r) = deg den - deg num;
/// kValuationInfinity for r = 0.
inline int valuation(const RationalQ& r, const Place& p) {
  if (r.is_zero()) return kValuationInfinity;
  if (p.infinite) return r.den.degree() - r.num.degree();
  return detail::multiplicity(r.num, p.pi) - detail::multiplicity(r.den, p.pi);
}

inline Divisor principal_divisor(const RationalQ& r, std::uint64_t seed = 0) {
  if (r.is_zero()) throw Error(Errc::ZeroFunction, "the zero function has no divisor");
  Divisor d;
  for (const auto& [pi, e] : factor_poly(r.num, seed).factors) d.add(Place{false, pi}, e);
  for (const auto& [pi, e] : factor_poly(r.den, seed).factors) d.add(Place{false, pi}, -e);
  d.add(infinite_place(), valuation(r, infinite_place()));
  return d;
}

struct RayCharSpec {
  const CharacterSystem* sys = nullptr;
  Handle theta = 0;
  PolyQ g;  // minimal polynomial of theta over F_q
  std::uint64_t j = 0;
  Handle b = 0;
  Divisor I;  // p_g p_inf^2

  bool trivial() const { return j == 0 && b == 0; }
};

inline RayCharSpec make_ray_char(const CharacterSystem& sys, Handle theta, std::uint64_t j, Handle b) {
  const TowerContext& ctx = sys.ctx();
  require_generator(ctx, theta);
  make_mult_char(ctx, j);
  make_subfield_add_char(ctx, b);
  RayCharSpec X;
  X.sys = &sys;
  X.theta = theta;
  X.g = minimal_polynomial(ctx, theta);
  X.j = j;
  X.b = b;
  X.I = Divisor::of(Place{false, X.g}, 1) * Divisor::of(infinite_place(), 2);
  if (X.I.degree() != ctx.m() + 2) throw Error(Errc::ConsistencyFailure, "deg I != m + 2");
  return X;
}

/// (log f(theta), S) for the monic polynomial f attached to a divisor prime to I,
/// where S is the sum of the roots of f with multiplicity.
struct RayCoordinates {
  bool meets_I = false;
  std::uint64_t L = 0;
  Handle S = 0;
};

/// Coordinates of the integral divisor of a monic f prime to g.
inline RayCoordinates ray_coordinates_of_poly(const TowerContext& ctx, Handle theta, const PolyQ& f) {
  RayCoordinates c;
  const Handle v = PolyE(&ctx, f.coeffs()).eval(theta);
  if (v == 0) {
    c.meets_I = true;
    return c;
  }
  c.L = ctx.log(v);
  c.S = f.degree() >= 1 ? ctx.neg(f.coeff(f.degree() - 1)) : 0;
  return c;
}

inline RayCoordinates ray_coordinates(const RayCharSpec& X, const Divisor& D) {
  const TowerContext& ctx = X.sys->ctx();
  const std::uint64_t n = ctx.group_order();
  RayCoordinates c;
  if (!D.coprime_to(X.I)) {
    c.meets_I = true;
    return c;
  }
  for (const auto& [p, e] : D.exponents()) {
    const RayCoordinates pc = ray_coordinates_of_poly(ctx, X.theta, p.pi);
    const std::uint64_t ee = static_cast<std::uint64_t>(((e % static_cast<long long>(n)) + static_cast<long long>(n)) % static_cast<long long>(n));
    c.L = (c.L + num::mulmod(ee, pc.L, n)) % n;
    Handle s = ctx.scale(pc.S, static_cast<std::uint32_t>(((e % static_cast<int>(ctx.p())) + static_cast<int>(ctx.p())) % static_cast<int>(ctx.p())));
    c.S = ctx.add(c.S, s);
  }
  return c;
}

inline cplx ray_value(const CharacterSystem& sys, std::uint64_t j, Handle b, const RayCoordinates& c) {
  if (c.meets_I) return {0.0, 0.0};
  const TowerContext& ctx = sys.ctx();
  return sys.chi(j, ctx.exp(c.L)) * sys.psi_sub(b, ctx.neg(c.S));
}

inline cplx ray_value(const RayCharSpec& X, const RayCoordinates& c) { return ray_value(*X.sys, X.j, X.b, c); }

/// X(D) = chi(f_D(theta)) psi(-S_D), extended multiplicatively; 0 when D meets supp(I).
inline cplx ray_char_value(const RayCharSpec& X, const Divisor& D) { return ray_value(X, ray_coordinates(X, D)); }

struct RaySample {
  PolyQ fa, fb;
  Divisor D;  // principal divisor of fa / fb
  RayCoordinates coords;
};

namespace detail {
inline PolyQ random_monic(const TowerContext& ctx, int k, std::mt19937_64& rng) {
  const auto& sub = ctx.subfield_q();
  std::vector<Handle> v(k + 1);
  for (int i = 0; i < k; ++i) v[i] = sub[rng() % sub.size()];
  v[k] = 1;
  return PolyQ(&ctx, std::move(v));
}
}  // namespace detail

/// Seeded pairs f_a = f_b + g h with f_b monic of degree k in [m + 2, m + 4],
/// prime to g, and deg(g h) <= k - 2; then f_a / f_b = 1 mod I.
inline std::vector<RaySample> ray_triviality_samples(const RayCharSpec& X, std::size_t count, std::uint64_t seed) {
  const TowerContext& ctx = X.sys->ctx();
  const int m = ctx.m();
  std::mt19937_64 rng(seed);
  std::vector<RaySample> out;
  while (out.size() < count) {
    const int k = m + 2 + static_cast<int>(rng() % 3);
    const PolyQ fb = detail::random_monic(ctx, k, rng);
    if (!gcd(fb, X.g).is_one()) continue;
    std::vector<Handle> hv(k - 1 - m);
    for (auto& c : hv) c = ctx.subfield_q()[rng() % ctx.q()];
    const PolyQ fa = fb + X.g * PolyQ(&ctx, std::move(hv));
    RaySample s;
    s.fa = fa;
    s.fb = fb;
    s.D = principal_divisor(RationalQ::make(fa, fb), seed);
    s.coords = ray_coordinates(X, s.D);
    out.push_back(std::move(s));
  }
  return out;
}

struct RayTrivialityReport {
  std::size_t samples = 0;
  std::size_t passes = 0;
  std::vector<std::pair<RaySample, cplx>> failures;
};

/// Evaluates X on precomputed samples; sample coordinates depend on theta only,
/// so one sample set serves every (chi, psi) on the same theta.
inline RayTrivialityReport verify_ray_triviality(const RayCharSpec& X, const std::vector<RaySample>& samples) {
  RayTrivialityReport r;
  for (const auto& s : samples) {
    const cplx v = ray_value(X, s.coords);
    ++r.samples;
    if (is_one(v))
      ++r.passes;
    else
      r.failures.emplace_back(s, v);
  }
  return r;
}

inline RayTrivialityReport verify_ray_triviality(const RayCharSpec& X, std::size_t sample_budget, std::uint64_t seed) {
  return verify_ray_triviality(X, ray_triviality_samples(X, sample_budget, seed));
}

struct DegreeOneSum {
  cplx sum;
  double bound = 0;  // (deg I - 2) sqrt(q)
  bool within_bound = false;
  cplx mixed;
  bool matches_mixed_sum = false;
};

/// Sum of X over the degree-one places p_{x+t}; X(p_inf) = 0.
inline DegreeOneSum degree_one_sum(const RayCharSpec& X, double match_tol = 1e-12) {
  if (X.trivial()) throw Error(Errc::BothTrivial, "chi and psi are both trivial");
  const TowerContext& ctx = X.sys->ctx();
  DegreeOneSum r;
  for (Handle t : ctx.subfield_q()) r.sum += ray_char_value(X, Divisor::of(Place{false, PolyQ::linear(&ctx, t)}));
  r.sum += ray_char_value(X, Divisor::of(infinite_place()));
  r.bound = static_cast<double>(X.I.degree() - 2) * std::sqrt(static_cast<double>(ctx.q()));
  r.within_bound = std::abs(r.sum) <= r.bound + kBoundTolerance;
  r.mixed = mixed_sum(*X.sys, X.theta, X.j, X.b).value;
  r.matches_mixed_sum = std::abs(r.sum - r.mixed) < match_tol;
  return r;
}

/// Coordinates of the degree-one places p_{x - t}, t in F_q, for one theta; the sum
/// over them is then a table lookup per (chi, psi). X(p_inf) = 0 is not stored.
class DegreeOnePlaces {
 public:
  explicit DegreeOnePlaces(const RayCharSpec& X) : sys_(X.sys) {
    const TowerContext& ctx = X.sys->ctx();
    for (Handle t : ctx.subfield_q()) coords_.push_back(ray_coordinates(X, Divisor::of(Place{false, PolyQ::linear(&ctx, t)})));
  }
  const std::vector<RayCoordinates>& coordinates() const { return coords_; }
  cplx sum(std::uint64_t j, Handle b) const {
    cplx acc{};
    for (const auto& c : coords_) acc += ray_value(*sys_, j, b, c);
    return acc;
  }

 private:
  const CharacterSystem* sys_;
  std::vector<RayCoordinates> coords_;
};

/// Candidate degree-0 divisors [f_a / f_b] in search order: for k = 1..m,
/// f_b is the first monic degree-k polynomial prime to g and f_a runs over the
/// other monic degree-k polynomials prime to g.
class NonsingularitySearch {
 public:
  struct Candidate {
    PolyQ fa, fb;
    std::uint64_t dL = 0;  // log f_a(theta) - log f_b(theta)
    Handle dS = 0;         // S_a - S_b
  };

  NonsingularitySearch(const TowerContext& ctx, Handle theta, const PolyQ& g) : ctx_(&ctx), theta_(theta), g_(g) {}

  /// Candidates are generated on demand and cached.
  const Candidate* at(std::size_t i) {
    while (cands_.size() <= i && advance()) {}
    return i < cands_.size() ? &cands_[i] : nullptr;
  }

  /// Principal divisor of candidate i and its coordinates modulo I; cached, since
  /// neither depends on the characters.
  const std::pair<Divisor, RayCoordinates>& divisor(std::size_t i, const RayCharSpec& X) {
    if (divs_.size() <= i) divs_.resize(i + 1);
    if (!divs_[i]) {
      const Candidate& c = *at(i);
      Divisor D = principal_divisor(RationalQ::make(c.fa, c.fb));
      RayCoordinates rc = ray_coordinates(X, D);
      divs_[i].emplace(std::move(D), rc);
    }
    return *divs_[i];
  }

 private:
  bool next_poly(std::vector<std::size_t>& digits) const {
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (++digits[i] < ctx_->q()) return true;
      digits[i] = 0;
    }
    return false;
  }
  PolyQ poly_of(const std::vector<std::size_t>& digits) const {
    std::vector<Handle> v(digits.size() + 1);
    for (std::size_t i = 0; i < digits.size(); ++i) v[i] = ctx_->subfield_q()[digits[i]];
    v.back() = 1;
    return PolyQ(ctx_, std::move(v));
  }
  bool coprime(const PolyQ& f) const { return PolyE(ctx_, f.coeffs()).eval(theta_) != 0; }

  bool advance() {
    for (;;) {
      if (!fb_) {
        if (k_ >= ctx_->m()) return false;
        ++k_;
        digits_.assign(k_, 0);
        do {
          PolyQ f = poly_of(digits_);
          if (coprime(f)) {
            fb_ = f;
            fb_c_ = ray_coordinates_of_poly(*ctx_, theta_, f);
            break;
          }
        } while (next_poly(digits_));
        digits_.assign(k_, 0);
        started_ = false;
        if (!fb_) continue;
      }
      if (started_ && !next_poly(digits_)) {
        fb_.reset();
        continue;
      }
      started_ = true;
      PolyQ fa = poly_of(digits_);
      if (fa == *fb_ || !coprime(fa)) continue;
      const RayCoordinates ca = ray_coordinates_of_poly(*ctx_, theta_, fa);
      const std::uint64_t n = ctx_->group_order();
      cands_.push_back({fa, *fb_, (ca.L + n - fb_c_.L) % n, ctx_->sub(ca.S, fb_c_.S)});
      return true;
    }
  }

  const TowerContext* ctx_;
  Handle theta_;
  PolyQ g_;
  int k_ = 0;
  std::optional<PolyQ> fb_;
  RayCoordinates fb_c_;
  std::vector<std::size_t> digits_;
  bool started_ = false;
  std::vector<Candidate> cands_;
  std::vector<std::optional<std::pair<Divisor, RayCoordinates>>> divs_;
};

struct NonsingularityWitness {
  Divisor witness;
  cplx value;
  PolyQ fa, fb;
  std::size_t candidates_tried = 0;
};

inline cplx candidate_value(const RayCharSpec& X, const NonsingularitySearch::Candidate& c) {
  const TowerContext& ctx = X.sys->ctx();
  return X.sys->chi(X.j, ctx.exp(c.dL)) * X.sys->psi_sub(X.b, ctx.neg(c.dS));
}

/// First degree-0 divisor prime to I with X != 1. Uses `search` when given so
/// that several specs on the same theta share the candidate list.
inline NonsingularityWitness verify_nonsingularity(const RayCharSpec& X, NonsingularitySearch* search = nullptr) {
  if (X.trivial()) throw Error(Errc::BothTrivial, "chi and psi are both trivial");
  std::optional<NonsingularitySearch> own;
  if (!search) {
    own.emplace(X.sys->ctx(), X.theta, X.g);
    search = &*own;
  }
  for (std::size_t i = 0;; ++i) {
    const auto* c = search->at(i);
    if (!c) throw Error(Errc::SearchExhausted, "no degree-0 divisor with X != 1 among quotients of degree <= m");
    const cplx v = candidate_value(X, *c);
    if (!is_one(v)) {
      const auto& [D, coords] = search->divisor(i, X);
      NonsingularityWitness w;
      w.fa = c->fa;
      w.fb = c->fb;
      w.witness = D;
      w.value = ray_value(X, coords);
      w.candidates_tried = i + 1;
      if (std::abs(w.value - v) > 1e-9) throw Error(Errc::ConsistencyFailure, "witness value differs between polynomial and divisor evaluation");
      return w;
    }
  }
}

}  // namespace charfield
