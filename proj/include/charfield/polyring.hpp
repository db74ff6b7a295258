#pragma once

// Univariate polynomials over F_q (PolyQ) and over F_{q^m} (PolyE), the
// complete factorization of PolyQ values, and the polynomial arithmetic
// functions Phi, mu' and W used by the freeness sieve.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "charfield/error.hpp"
#include "charfield/ff_core.hpp"

namespace charfield {

struct SubfieldCoeffs {};
struct ExtensionCoeffs {};

/// Dense polynomial with coefficients given as handles of one tower, constant
/// term first. The zero polynomial has no coefficients and degree -1.
/// With Tag = SubfieldCoeffs every coefficient is checked to lie in F_q.
template <class Tag>
class BasicPoly {
 public:
  BasicPoly() = default;
  BasicPoly(const TowerContext* ctx, std::vector<Handle> coeffs) : ctx_(ctx), c_(std::move(coeffs)) {
    if (!ctx_) throw Error(Errc::InvalidArgument, "polynomial without context");
    for (Handle h : c_) {
      if (h >= ctx_->size()) throw Error(Errc::InvalidArgument, "coefficient handle out of range");
      if constexpr (std::is_same_v<Tag, SubfieldCoeffs>) {
        if (!ctx_->in_subfield(h)) throw Error(Errc::InvalidArgument, "coefficient " + std::to_string(h) + " is not in F_q");
      }
    }
    trim();
  }

  static BasicPoly zero(const TowerContext* ctx) { return BasicPoly(ctx, {}); }
  static BasicPoly constant(const TowerContext* ctx, Handle c) { return BasicPoly(ctx, {c}); }
  static BasicPoly one(const TowerContext* ctx) { return BasicPoly(ctx, {1}); }
  /// c * x^k
  static BasicPoly monomial(const TowerContext* ctx, int k, Handle c = 1) {
    std::vector<Handle> v(k + 1, 0);
    v[k] = c;
    return BasicPoly(ctx, std::move(v));
  }
  /// x + t
  static BasicPoly linear(const TowerContext* ctx, Handle t) { return BasicPoly(ctx, {t, 1}); }

  const TowerContext* context() const { return ctx_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  Handle lead() const { return c_.empty() ? 0 : c_.back(); }
  Handle coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0; }
  const std::vector<Handle>& coeffs() const { return c_; }

  BasicPoly monic() const {
    if (c_.empty()) return *this;
    return scaled(ctx_->inv(lead()));
  }
  BasicPoly scaled(Handle s) const {
    std::vector<Handle> v(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = ctx_->mul(c_[i], s);
    return raw(std::move(v));
  }

  Handle eval(Handle x) const {
    Handle acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = ctx_->add(ctx_->mul(acc, x), *it);
    return acc;
  }

  BasicPoly derivative() const {
    if (c_.size() <= 1) return zero(ctx_);
    std::vector<Handle> v(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = ctx_->scale(c_[i], static_cast<std::uint32_t>(i % ctx_->p()));
    return raw(std::move(v));
  }

  BasicPoly operator+(const BasicPoly& o) const {
    check(o);
    std::vector<Handle> v(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = ctx_->add(coeff(static_cast<int>(i)), o.coeff(static_cast<int>(i)));
    return raw(std::move(v));
  }
  BasicPoly operator-() const {
    std::vector<Handle> v(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = ctx_->neg(c_[i]);
    return raw(std::move(v));
  }
  BasicPoly operator-(const BasicPoly& o) const { return *this + (-o); }
  BasicPoly operator*(const BasicPoly& o) const {
    check(o);
    if (is_zero() || o.is_zero()) return zero(ctx_);
    std::vector<Handle> v(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (!c_[i]) continue;
      for (std::size_t j = 0; j < o.c_.size(); ++j) v[i + j] = ctx_->add(v[i + j], ctx_->mul(c_[i], o.c_[j]));
    }
    return raw(std::move(v));
  }

  bool operator==(const BasicPoly& o) const { return ctx_ == o.ctx_ && c_ == o.c_; }

  /// Deterministic total order: by degree, then coefficients from the top down.
  bool operator<(const BasicPoly& o) const {
    if (c_.size() != o.c_.size()) return c_.size() < o.c_.size();
    return std::lexicographical_compare(c_.rbegin(), c_.rend(), o.c_.rbegin(), o.c_.rend());
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(c_[i]);
    }
    return s.empty() ? "0" : s;
  }

  /// Builds without re-validating coefficients (they come from closed operations).
  BasicPoly raw(std::vector<Handle> v) const {
    BasicPoly r;
    r.ctx_ = ctx_;
    r.c_ = std::move(v);
    r.trim();
    return r;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  void check(const BasicPoly& o) const {
    if (ctx_ != o.ctx_) throw Error(Errc::ContextMismatch, "polynomials from different towers");
  }

  const TowerContext* ctx_ = nullptr;
  std::vector<Handle> c_;
};

using PolyQ = BasicPoly<SubfieldCoeffs>;
using PolyE = BasicPoly<ExtensionCoeffs>;

template <class Tag>
std::pair<BasicPoly<Tag>, BasicPoly<Tag>> divmod(const BasicPoly<Tag>& f, const BasicPoly<Tag>& g) {
  if (g.is_zero()) throw Error(Errc::DivisionByZero, "polynomial division by zero");
  const TowerContext* ctx = f.context();
  if (ctx != g.context()) throw Error(Errc::ContextMismatch, "polynomials from different towers");
  std::vector<Handle> r = f.coeffs();
  const int dg = g.degree();
  if (f.degree() < dg) return {BasicPoly<Tag>::zero(ctx), f};
  std::vector<Handle> quot(f.degree() - dg + 1, 0);
  const Handle inv_lead = ctx->inv(g.lead());
  for (int i = f.degree(); i >= dg; --i) {
    Handle c = r[i];
    if (c == 0) continue;
    Handle t = ctx->mul(c, inv_lead);
    quot[i - dg] = t;
    for (int j = 0; j <= dg; ++j) r[i - dg + j] = ctx->sub(r[i - dg + j], ctx->mul(t, g.coeff(j)));
  }
  r.resize(dg);
  return {f.raw(std::move(quot)), f.raw(std::move(r))};
}

template <class Tag>
BasicPoly<Tag> operator%(const BasicPoly<Tag>& f, const BasicPoly<Tag>& g) {
  return divmod(f, g).second;
}

template <class Tag>
BasicPoly<Tag> operator/(const BasicPoly<Tag>& f, const BasicPoly<Tag>& g) {
  return divmod(f, g).first;
}

/// Monic gcd; gcd(f, 0) is the monic associate of f, gcd(0, 0) = 0.
template <class Tag>
BasicPoly<Tag> gcd(BasicPoly<Tag> a, BasicPoly<Tag> b) {
  while (!b.is_zero()) {
    auto r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

template <class Tag>
bool divides(const BasicPoly<Tag>& d, const BasicPoly<Tag>& f) {
  if (d.is_zero()) return f.is_zero();
  return (f % d).is_zero();
}

template <class Tag>
BasicPoly<Tag> powmod(BasicPoly<Tag> base, std::uint64_t e, const BasicPoly<Tag>& f) {
  auto r = BasicPoly<Tag>::one(f.context()) % f;
  base = base % f;
  while (e) {
    if (e & 1) r = (r * base) % f;
    e >>= 1;
    if (e) base = (base * base) % f;
  }
  return r;
}

/// x^m - 1 over F_q.
inline PolyQ x_pow_minus_one(const TowerContext& ctx, int m) {
  std::vector<Handle> v(m + 1, 0);
  v[0] = ctx.neg(1);
  v[m] = 1;
  return PolyQ(&ctx, std::move(v));
}

/// Writes m = m0 * p^a with gcd(m0, p) = 1 and returns m0.
inline int radical_exponent(int m, std::uint64_t p) {
  if (m < 1) throw Error(Errc::InvalidArgument, "m must be positive");
  while (m % static_cast<int>(p) == 0) m /= static_cast<int>(p);
  return m;
}

/// The p-radical x^{m0} - 1 of x^m - 1.
inline PolyQ xm1_radical(const TowerContext& ctx, int m) { return x_pow_minus_one(ctx, radical_exponent(m, ctx.p())); }

/// g o alpha = sum g_i alpha^{q^i} (the F_q[x]-module action on F_{q^m}).
inline Handle linearized_apply(const PolyQ& g, Handle alpha) {
  const TowerContext* ctx = g.context();
  Handle acc = 0;
  for (int i = 0; i <= g.degree(); ++i) {
    Handle c = g.coeff(i);
    if (c) acc = ctx->add(acc, ctx->mul(c, ctx->frobenius(alpha, static_cast<std::uint64_t>(i))));
  }
  return acc;
}

/// Minimal polynomial over F_q of an element of F_{q^m}.
inline PolyQ minimal_polynomial(const TowerContext& ctx, Handle theta) {
  const int d = ctx.degree_over_subfield(theta);
  PolyE acc = PolyE::one(&ctx);
  for (int i = 0; i < d; ++i) acc = acc * PolyE::linear(&ctx, ctx.neg(ctx.frobenius(theta, i)));
  return PolyQ(&ctx, acc.coeffs());
}

struct PolyFactorization {
  PolyQ original;
  Handle unit = 1;  // leading coefficient of original
  std::vector<std::pair<PolyQ, int>> factors;

  PolyQ product() const {
    PolyQ r = PolyQ::constant(original.context(), unit);
    for (const auto& [f, e] : factors)
      for (int i = 0; i < e; ++i) r = r * f;
    return r;
  }
  std::size_t distinct_count() const { return factors.size(); }
};

namespace detail {

inline std::uint64_t rng_next(std::mt19937_64& rng) { return rng(); }

inline PolyQ random_poly_below(const TowerContext& ctx, int deg_bound, std::mt19937_64& rng) {
  const auto& sub = ctx.subfield_q();
  std::vector<Handle> v(deg_bound);
  for (auto& c : v) c = sub[rng_next(rng) % sub.size()];
  return PolyQ(&ctx, std::move(v));
}

inline PolyQ pth_root(const PolyQ& f) {
  const TowerContext& ctx = *f.context();
  const int p = static_cast<int>(ctx.p());
  const std::int64_t e = static_cast<std::int64_t>(ctx.q() / ctx.p());
  std::vector<Handle> v(f.degree() / p + 1, 0);
  for (int i = 0; i <= f.degree(); i += p) v[i / p] = ctx.pow(f.coeff(i), e);
  return PolyQ(&ctx, std::move(v));
}

// Squarefree decomposition of a monic polynomial: pairs (a_i, i) with
// f = prod a_i^i, each a_i squarefree and pairwise coprime.
inline std::vector<std::pair<PolyQ, int>> squarefree_parts(const PolyQ& f) {
  std::vector<std::pair<PolyQ, int>> out;
  if (f.degree() <= 0) return out;
  const int p = static_cast<int>(f.context()->p());
  PolyQ c = gcd(f, f.derivative());
  PolyQ w = f / c;
  int i = 1;
  while (!w.is_one()) {
    PolyQ y = gcd(w, c);
    PolyQ fac = w / y;
    if (!fac.is_one()) out.emplace_back(fac.monic(), i);
    w = y;
    c = c / y;
    ++i;
  }
  if (!c.is_one()) {
    for (auto& [g, k] : squarefree_parts(pth_root(c).monic())) out.emplace_back(g, k * p);
  }
  return out;
}

inline std::vector<std::pair<PolyQ, int>> distinct_degree(const PolyQ& f) {
  std::vector<std::pair<PolyQ, int>> out;
  const TowerContext* ctx = f.context();
  const PolyQ x = PolyQ::monomial(ctx, 1);
  PolyQ rest = f;
  PolyQ h = x % rest;
  for (int i = 1; 2 * i <= rest.degree(); ++i) {
    h = powmod(h, ctx->q(), rest);
    PolyQ g = gcd(h - x, rest);
    if (!g.is_one()) {
      out.emplace_back(g, i);
      rest = rest / g;
      h = h % rest;
    }
  }
  if (rest.degree() > 0) out.emplace_back(rest, rest.degree());
  return out;
}

inline void equal_degree(const PolyQ& f, int d, std::mt19937_64& rng, std::vector<PolyQ>& out) {
  if (f.degree() == d) {
    out.push_back(f);
    return;
  }
  const TowerContext& ctx = *f.context();
  const std::uint64_t q = ctx.q();
  for (;;) {
    PolyQ a = random_poly_below(ctx, f.degree(), rng);
    if (a.degree() <= 0) continue;
    PolyQ b;
    if (q % 2 == 1) {
      // a^{(q^d - 1)/2} = (a^{1 + q + ... + q^{d-1}})^{(q-1)/2}
      PolyQ t = a, acc = a;
      for (int i = 1; i < d; ++i) {
        t = powmod(t, q, f);
        acc = (acc * t) % f;
      }
      b = powmod(acc, (q - 1) / 2, f) - PolyQ::one(&ctx);
    } else {
      // absolute trace a + a^2 + ... + a^{2^{sd-1}}
      PolyQ t = a, acc = a;
      for (int i = 1; i < ctx.s() * d; ++i) {
        t = (t * t) % f;
        acc = acc + t;
      }
      b = acc;
    }
    PolyQ g = gcd(b, f);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree(g, d, rng, out);
      equal_degree(f / g, d, rng, out);
      return;
    }
  }
}

}  // namespace detail

/// Rabin irreducibility test over F_q.
inline bool is_irreducible(const PolyQ& f) {
  const int n = f.degree();
  if (n <= 0) return false;
  if (n == 1) return true;
  const TowerContext* ctx = f.context();
  const PolyQ g = f.monic();
  const PolyQ x = PolyQ::monomial(ctx, 1);
  std::vector<PolyQ> frob(n + 1);
  frob[0] = x % g;
  for (int k = 1; k <= n; ++k) frob[k] = powmod(frob[k - 1], ctx->q(), g);
  if (!(frob[n] == x % g)) return false;
  for (auto [r, e] : num::factor_int(static_cast<std::uint64_t>(n)).factors) {
    if (!gcd(frob[n / r] - x, g).is_one()) return false;
  }
  return true;
}

/// Complete factorization into monic irreducibles: squarefree decomposition,
/// distinct-degree, then equal-degree splitting driven by a generator seeded
/// from `seed` alone. Factors are sorted and each is re-verified irreducible.
inline PolyFactorization factor_poly(const PolyQ& f, std::uint64_t seed = 0) {
  if (f.is_zero()) throw Error(Errc::ZeroPolynomial, "cannot factor the zero polynomial");
  PolyFactorization out;
  out.original = f;
  out.unit = f.lead();
  std::mt19937_64 rng(seed);
  std::map<PolyQ, int> acc;
  for (const auto& [part, mult] : detail::squarefree_parts(f.monic())) {
    for (const auto& [block, d] : detail::distinct_degree(part)) {
      std::vector<PolyQ> irr;
      detail::equal_degree(block, d, rng, irr);
      for (auto& g : irr) acc[g.monic()] += mult;
    }
  }
  for (auto& [g, e] : acc) {
    if (!is_irreducible(g)) throw Error(Errc::ConsistencyFailure, "factor " + g.to_string() + " failed irreducibility check");
    out.factors.emplace_back(g, e);
  }
  return out;
}

namespace detail {
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b && a > UINT64_MAX / b) throw Error(Errc::InvalidArgument, "polynomial arithmetic function overflows 64 bits");
  return a * b;
}
inline std::uint64_t checked_ipow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r = checked_mul(r, b);
  return r;
}
}  // namespace detail

/// Phi(f) = |(F_q[x]/f)^*| from the exponent vector over the given factors.
inline std::uint64_t euler_phi_poly(const PolyFactorization& fac, const std::vector<int>& exps) {
  const std::uint64_t q = fac.original.context()->q();
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < fac.factors.size(); ++i) {
    const int e = exps[i];
    if (e == 0) continue;
    const std::uint64_t d = static_cast<std::uint64_t>(fac.factors[i].first.degree());
    std::uint64_t hi = detail::checked_ipow(q, d * e);
    std::uint64_t lo = detail::checked_ipow(q, d * (e - 1));
    r = detail::checked_mul(r, hi - lo);
  }
  return r;
}

inline std::uint64_t euler_phi_poly(const PolyFactorization& fac) {
  std::vector<int> exps;
  for (const auto& [g, e] : fac.factors) exps.push_back(e);
  return euler_phi_poly(fac, exps);
}

inline std::uint64_t euler_phi_poly(const PolyQ& f) { return euler_phi_poly(factor_poly(f.monic())); }

/// mu'(f): (-1)^s for a product of s distinct monic irreducibles, 0 otherwise.
inline int mobius_poly(const std::vector<int>& exps) {
  int s = 0;
  for (int e : exps) {
    if (e > 1) return 0;
    s += e;
  }
  return (s % 2) ? -1 : 1;
}

inline int mobius_poly(const PolyFactorization& fac) {
  std::vector<int> exps;
  for (const auto& [g, e] : fac.factors) exps.push_back(e);
  return mobius_poly(exps);
}

inline int mobius_poly(const PolyQ& f) { return mobius_poly(factor_poly(f.monic())); }

/// Monic divisors of a factored polynomial. Entries are sorted by degree, then
/// by coefficients, so the first entry satisfying an annihilation condition is
/// the minimal-degree one.
struct DivisorLattice {
  struct Entry {
    PolyQ poly;
    std::vector<int> exps;  // exponent of each factor of `fac`
    std::uint64_t phi = 0;
    int mu = 0;
    bool squarefree = false;
  };

  PolyFactorization fac;
  std::vector<Entry> all;
  std::vector<std::size_t> squarefree;  // indices into all
  std::uint64_t W = 1;

  std::size_t index_of(const PolyQ& g) const {
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all[i].poly == g) return i;
    throw Error(Errc::NotADivisor, g.to_string() + " is not a monic divisor of " + fac.original.to_string());
  }
  /// True when entry a divides entry b.
  bool divides(std::size_t a, std::size_t b) const {
    for (std::size_t i = 0; i < all[a].exps.size(); ++i)
      if (all[a].exps[i] > all[b].exps[i]) return false;
    return true;
  }
  std::size_t top() const { return all.size() - 1; }
  std::vector<PolyQ> all_monic_divisors() const {
    std::vector<PolyQ> v;
    for (const auto& e : all) v.push_back(e.poly);
    return v;
  }
  std::vector<PolyQ> squarefree_divisors() const {
    std::vector<PolyQ> v;
    for (auto i : squarefree) v.push_back(all[i].poly);
    return v;
  }
};

inline DivisorLattice divisor_lattice(const PolyFactorization& fac) {
  DivisorLattice lat;
  lat.fac = fac;
  const TowerContext* ctx = fac.original.context();
  const std::size_t k = fac.factors.size();
  std::vector<int> exps(k, 0);
  for (;;) {
    DivisorLattice::Entry e;
    e.exps = exps;
    e.poly = PolyQ::one(ctx);
    for (std::size_t i = 0; i < k; ++i)
      for (int j = 0; j < exps[i]; ++j) e.poly = e.poly * fac.factors[i].first;
    e.phi = euler_phi_poly(fac, exps);
    e.mu = mobius_poly(exps);
    e.squarefree = e.mu != 0;
    lat.all.push_back(std::move(e));
    std::size_t i = 0;
    while (i < k && exps[i] == fac.factors[i].second) exps[i++] = 0;
    if (i == k) break;
    ++exps[i];
  }
  std::sort(lat.all.begin(), lat.all.end(), [](const auto& a, const auto& b) { return a.poly < b.poly; });
  for (std::size_t i = 0; i < lat.all.size(); ++i)
    if (lat.all[i].squarefree) lat.squarefree.push_back(i);
  lat.W = std::uint64_t{1} << k;
  return lat;
}

inline DivisorLattice divisor_lattice(const PolyQ& f, std::uint64_t seed = 0) { return divisor_lattice(factor_poly(f.monic(), seed)); }

}  // namespace charfield
