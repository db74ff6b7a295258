#pragma once

// Exact arithmetic in the tower F_p <= F_q <= F_{q^m}.
//
// F_{q^m} is realized once as F_p[t]/(H) with deg H = s*m. Elements are
// integer handles encoding their coefficient vector over F_p in base p
// (handle = sum d_i p^i, d_i the coefficient of t^i). F_q is recovered as the
// fixed field of x -> x^q. Multiplication goes through discrete-log tables and
// addition through Zech logarithms, so every field operation is O(1).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "charfield/error.hpp"
#include "charfield/numutil.hpp"

namespace charfield {

using Handle = std::uint32_t;

class TowerContext;
using ContextPtr = std::shared_ptr<const TowerContext>;

struct TowerOptions {
  std::uint64_t seed = 0;
  std::uint64_t size_cap = std::uint64_t{1} << 22;
};

ContextPtr build_tower(std::uint64_t p, int s, int m, const TowerOptions& opts = {});

namespace detail {

// Dense polynomials over F_p, coefficient i is the coefficient of x^i. Used
// only while constructing a tower.
using PolyFp = std::vector<std::uint32_t>;

inline void trim(PolyFp& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline PolyFp mod_fp(PolyFp a, const PolyFp& f, std::uint32_t p) {
  trim(a);
  const std::size_t df = f.size() - 1;
  const std::uint32_t inv_lead = static_cast<std::uint32_t>(num::powmod(f.back(), p - 2, p));
  while (a.size() > df) {
    std::uint32_t c = static_cast<std::uint32_t>(std::uint64_t{a.back()} * inv_lead % p);
    std::size_t shift = a.size() - 1 - df;
    for (std::size_t i = 0; i <= df; ++i) {
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + std::uint64_t{p - c} * f[i]) % p);
    }
    trim(a);
  }
  return a;
}

inline PolyFp mulmod_fp(const PolyFp& a, const PolyFp& b, const PolyFp& f, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  PolyFp r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t{a[i]} * b[j]) % p);
  }
  return mod_fp(std::move(r), f, p);
}

inline PolyFp powmod_fp(PolyFp base, std::uint64_t e, const PolyFp& f, std::uint32_t p) {
  PolyFp r{1};
  base = mod_fp(std::move(base), f, p);
  while (e) {
    if (e & 1) r = mulmod_fp(r, base, f, p);
    e >>= 1;
    if (e) base = mulmod_fp(base, base, f, p);
  }
  return r;
}

inline PolyFp gcd_fp(PolyFp a, PolyFp b, std::uint32_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    a = mod_fp(std::move(a), b, p);
    std::swap(a, b);
  }
  return a;
}

// Rabin's test: f (monic, degree n) is irreducible over F_p iff
// x^{p^n} = x mod f and gcd(x^{p^{n/r}} - x, f) = 1 for every prime r | n.
inline bool is_irreducible_fp(const PolyFp& f, std::uint32_t p) {
  const std::size_t n = f.size() - 1;
  if (n == 0) return false;
  if (n == 1) return true;
  if (f[0] == 0) return false;
  std::vector<PolyFp> frob(n + 1);
  frob[0] = mod_fp({0, 1}, f, p);
  for (std::size_t k = 1; k <= n; ++k) frob[k] = powmod_fp(frob[k - 1], p, f, p);
  PolyFp x = mod_fp({0, 1}, f, p);
  if (frob[n] != x) return false;
  auto nf = num::factor_int(n);
  for (auto [r, e] : nf.factors) {
    PolyFp h = frob[n / r];
    h.resize(std::max<std::size_t>(h.size(), 2), 0);
    h[1] = (h[1] + p - 1) % p;
    trim(h);
    PolyFp g = gcd_fp(f, h, p);
    if (g.size() != 1) return false;
  }
  return true;
}

inline std::uint64_t checked_pow(std::uint64_t base, int e, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

inline std::atomic<std::uint64_t>& context_counter() {
  static std::atomic<std::uint64_t> c{1};
  return c;
}

}  // namespace detail

/// Value type for one element of a tower. Holds a non-owning pointer to its
/// context, which must outlive it.
class FFElement {
 public:
  FFElement() = default;
  FFElement(const TowerContext* ctx, Handle h) : ctx_(ctx), h_(h) {}

  Handle handle() const { return h_; }
  const TowerContext* context() const { return ctx_; }
  std::uint64_t context_id() const;
  bool is_zero() const { return h_ == 0; }

  FFElement operator+(const FFElement& o) const;
  FFElement operator-(const FFElement& o) const;
  FFElement operator*(const FFElement& o) const;
  FFElement operator/(const FFElement& o) const;
  FFElement operator-() const;
  FFElement inv() const;
  FFElement pow(std::int64_t k) const;

  bool operator==(const FFElement& o) const { return ctx_ == o.ctx_ && h_ == o.h_; }

 private:
  const TowerContext* same(const FFElement& o) const;

  const TowerContext* ctx_ = nullptr;
  Handle h_ = 0;
};

class TowerContext {
 public:
  static constexpr std::uint32_t kNoLog = 0xffffffffu;

  TowerContext(const TowerContext&) = delete;
  TowerContext& operator=(const TowerContext&) = delete;

  std::uint32_t p() const { return p_; }
  int s() const { return s_; }
  int m() const { return m_; }
  std::uint64_t q() const { return q_; }
  /// Absolute degree s*m over F_p.
  int degree() const { return n_; }
  std::uint64_t size() const { return size_; }
  /// q^m - 1.
  std::uint64_t group_order() const { return order_; }
  std::uint64_t id() const { return id_; }
  std::uint64_t seed() const { return seed_; }

  /// Modulus H over F_p, constant term first, monic of degree s*m.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  const num::IntFactorization& group_order_factorization() const { return order_fac_; }

  FFElement element(Handle h) const {
    if (h >= size_) throw Error(Errc::InvalidArgument, "handle " + std::to_string(h) + " out of range");
    return FFElement(this, h);
  }
  FFElement zero() const { return FFElement(this, 0); }
  FFElement one() const { return FFElement(this, 1); }
  FFElement gamma() const { return FFElement(this, exp_[1 % order_]); }
  /// Embeds an F_p residue as a constant.
  Handle from_prime_field(std::uint64_t v) const { return static_cast<Handle>(v % p_); }

  // Raw handle arithmetic. No context checks; inputs must be valid handles.

  std::uint32_t log(Handle a) const {
    if (a == 0) throw Error(Errc::ZeroElement, "discrete log of zero");
    return log_[a];
  }
  std::uint32_t log_unchecked(Handle a) const { return log_[a]; }
  Handle exp(std::uint64_t k) const { return exp_[k % order_]; }

  Handle add(Handle a, Handle b) const {
    if (a == 0) return b;
    if (b == 0) return a;
    std::uint32_t la = log_[a], lb = log_[b];
    std::uint32_t d = lb >= la ? lb - la : static_cast<std::uint32_t>(lb + order_ - la);
    std::uint32_t z = zech_[d];
    if (z == kNoLog) return 0;
    std::uint64_t s = std::uint64_t{la} + z;
    if (s >= order_) s -= order_;
    return exp_[s];
  }
  Handle neg(Handle a) const {
    if (a == 0 || p_ == 2) return a;
    std::uint64_t s = std::uint64_t{log_[a]} + order_ / 2;
    if (s >= order_) s -= order_;
    return exp_[s];
  }
  Handle sub(Handle a, Handle b) const { return add(a, neg(b)); }
  Handle mul(Handle a, Handle b) const {
    if (a == 0 || b == 0) return 0;
    std::uint64_t s = std::uint64_t{log_[a]} + log_[b];
    if (s >= order_) s -= order_;
    return exp_[s];
  }
  Handle inv(Handle a) const {
    if (a == 0) throw Error(Errc::DivisionByZero, "inverse of zero");
    std::uint32_t l = log_[a];
    return exp_[l == 0 ? 0 : order_ - l];
  }
  Handle div(Handle a, Handle b) const {
    if (b == 0) throw Error(Errc::DivisionByZero, "division by zero");
    return mul(a, inv(b));
  }
  /// a^k for any integer k (k < 0 requires a != 0; 0^0 = 1).
  Handle pow(Handle a, std::int64_t k) const {
    if (a == 0) {
      if (k < 0) throw Error(Errc::DivisionByZero, "negative power of zero");
      return k == 0 ? 1 : 0;
    }
    std::int64_t r = k % static_cast<std::int64_t>(order_);
    if (r < 0) r += static_cast<std::int64_t>(order_);
    return exp_[num::mulmod(log_[a], static_cast<std::uint64_t>(r), order_)];
  }
  /// Multiplies by an F_p scalar.
  Handle scale(Handle a, std::uint32_t c) const { return mul(a, from_prime_field(c)); }

  /// a^{q^k}; k may be any nonnegative integer (the map has period m).
  Handle frobenius(Handle a, std::uint64_t k) const {
    if (a == 0) return 0;
    return exp_[num::mulmod(log_[a], q_pow_mod_order_[k % m_], order_)];
  }
  /// a^{p^k}.
  Handle frobenius_p(Handle a, std::uint64_t k) const {
    if (a == 0) return 0;
    return exp_[num::mulmod(log_[a], p_pow_mod_order_[k % n_], order_)];
  }

  /// Tr_{q^m/q}(a), an element of F_q.
  Handle trace_to_subfield(Handle a) const { return trace_q_[a]; }
  /// Tr_{q^m/p}(a) as a residue in [0, p).
  std::uint32_t trace_to_prime(Handle a) const { return trace_p_[a]; }
  /// Tr_{q/p}(t) for t in F_q, as a residue in [0, p).
  std::uint32_t subfield_trace_to_prime(Handle t) const { return trace_p_[mul(unit_trace_, t)]; }

  bool in_subfield(Handle a) const {
    if (a == 0) return true;
    return log_[a] % subfield_step_ == 0;
  }
  /// The q elements of F_q, ascending by handle.
  const std::vector<Handle>& subfield_q() const { return subfield_; }

  /// Degree of the minimal polynomial of a over F_q.
  int degree_over_subfield(Handle a) const {
    for (int k = 1; k < m_; ++k)
      if (m_ % k == 0 && frobenius(a, k) == a) return k;
    return m_;
  }
  bool is_extension_generator(Handle a) const { return degree_over_subfield(a) == m_; }
  std::vector<Handle> extension_generators() const {
    std::vector<Handle> out;
    for (Handle h = 0; h < size_; ++h)
      if (is_extension_generator(h)) out.push_back(h);
    return out;
  }

  /// Exact multiplicative order, obtained by stripping prime factors from q^m - 1.
  std::uint64_t mult_order(Handle a) const {
    if (a == 0) throw Error(Errc::ZeroElement, "order of zero");
    std::uint64_t ord = order_;
    for (auto [r, e] : order_fac_.factors) {
      for (int i = 0; i < e; ++i) {
        if (pow(a, static_cast<std::int64_t>(ord / r)) != 1) break;
        ord /= r;
      }
    }
    return ord;
  }
  bool is_primitive(Handle a) const { return a != 0 && std::gcd<std::uint64_t, std::uint64_t>(log_[a], order_) == 1; }

  /// Coefficient vector over F_p (length s*m, constant first).
  std::vector<std::uint32_t> digits(Handle a) const {
    std::vector<std::uint32_t> d(n_);
    for (int i = 0; i < n_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }
  Handle from_digits(const std::vector<std::uint32_t>& d) const {
    Handle h = 0;
    for (int i = n_ - 1; i >= 0; --i) h = h * p_ + (i < static_cast<int>(d.size()) ? d[i] % p_ : 0);
    return h;
  }
  /// t^i, the i-th element of the polynomial basis over F_p.
  Handle basis_element(int i) const { return static_cast<Handle>(detail::checked_pow(p_, i, size_)); }

 private:
  friend ContextPtr build_tower(std::uint64_t, int, int, const TowerOptions&);
  TowerContext() = default;

  std::uint32_t p_ = 0;
  int s_ = 0, m_ = 0, n_ = 0;
  std::uint64_t q_ = 0, size_ = 0, order_ = 0;
  std::uint64_t id_ = 0, seed_ = 0;
  std::vector<std::uint32_t> modulus_;
  num::IntFactorization order_fac_;
  std::vector<Handle> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> zech_;
  std::vector<Handle> trace_q_;
  std::vector<std::uint32_t> trace_p_;
  std::vector<Handle> subfield_;
  std::uint64_t subfield_step_ = 1;
  Handle unit_trace_ = 0;
  std::vector<std::uint64_t> q_pow_mod_order_;
  std::vector<std::uint64_t> p_pow_mod_order_;
};

inline std::uint64_t FFElement::context_id() const { return ctx_ ? ctx_->id() : 0; }

inline const TowerContext* FFElement::same(const FFElement& o) const {
  if (!ctx_ || ctx_ != o.ctx_) throw Error(Errc::ContextMismatch, "elements belong to different towers");
  return ctx_;
}
inline FFElement FFElement::operator+(const FFElement& o) const { return {same(o), same(o)->add(h_, o.h_)}; }
inline FFElement FFElement::operator-(const FFElement& o) const { return {same(o), same(o)->sub(h_, o.h_)}; }
inline FFElement FFElement::operator*(const FFElement& o) const { return {same(o), same(o)->mul(h_, o.h_)}; }
inline FFElement FFElement::operator/(const FFElement& o) const { return {same(o), same(o)->div(h_, o.h_)}; }
inline FFElement FFElement::operator-() const {
  if (!ctx_) throw Error(Errc::ContextMismatch, "element without context");
  return {ctx_, ctx_->neg(h_)};
}
inline FFElement FFElement::inv() const {
  if (!ctx_) throw Error(Errc::ContextMismatch, "element without context");
  return {ctx_, ctx_->inv(h_)};
}
inline FFElement FFElement::pow(std::int64_t k) const {
  if (!ctx_) throw Error(Errc::ContextMismatch, "element without context");
  return {ctx_, ctx_->pow(h_, k)};
}

/// Builds the tower F_p <= F_{p^s} <= F_{p^{sm}}.
///
/// The modulus is the first irreducible polynomial met by a seeded cyclic scan
/// over monic degree-sm polynomials; gamma is the smallest-handle primitive
/// root. Both depend only on (p, s, m, seed).
inline ContextPtr build_tower(std::uint64_t p, int s, int m, const TowerOptions& opts) {
  if (!num::is_prime(p)) throw Error(Errc::NonPrime, std::to_string(p) + " is not prime");
  if (s < 1) throw Error(Errc::InvalidArgument, "s must be positive");
  if (m < 2) throw Error(Errc::InvalidArgument, "m must be > 1");
  const int n = s * m;
  const std::uint64_t size = detail::checked_pow(p, n, opts.size_cap);
  if (size > opts.size_cap || size > (std::uint64_t{1} << 31))
    throw Error(Errc::SizeExceeded, "p^(s*m) exceeds the size cap " + std::to_string(opts.size_cap));

  auto ctx = std::shared_ptr<TowerContext>(new TowerContext());
  TowerContext& c = *ctx;
  const std::uint32_t pp = static_cast<std::uint32_t>(p);
  c.p_ = pp;
  c.s_ = s;
  c.m_ = m;
  c.n_ = n;
  c.q_ = detail::checked_pow(p, s, size);
  c.size_ = size;
  c.order_ = size - 1;
  c.seed_ = opts.seed;
  c.id_ = detail::context_counter().fetch_add(1);
  c.order_fac_ = num::factor_int(c.order_, {.seed = opts.seed});

  // Seeded scan for an irreducible modulus.
  const std::uint64_t start = num::splitmix64(opts.seed) % size;
  for (std::uint64_t i = 0; i < size; ++i) {
    std::uint64_t k = (start + i) % size;
    detail::PolyFp f(n + 1, 0);
    for (int j = 0; j < n; ++j) {
      f[j] = static_cast<std::uint32_t>(k % p);
      k /= p;
    }
    f[n] = 1;
    if (f[0] == 0) continue;
    if (detail::is_irreducible_fp(f, pp)) {
      c.modulus_ = f;
      break;
    }
  }
  if (c.modulus_.empty()) throw Error(Errc::ConsistencyFailure, "no irreducible modulus found");

  auto to_poly = [&](Handle h) {
    detail::PolyFp d(n);
    for (int i = 0; i < n; ++i) {
      d[i] = h % pp;
      h /= pp;
    }
    detail::trim(d);
    return d;
  };
  auto from_poly = [&](const detail::PolyFp& d) {
    Handle h = 0;
    for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) h = h * pp + d[i];
    return h;
  };

  // Smallest-handle primitive root.
  Handle gamma = 0;
  for (Handle h = 1; h < size; ++h) {
    auto poly = to_poly(h);
    bool primitive = true;
    for (auto [r, e] : c.order_fac_.factors) {
      if (detail::powmod_fp(poly, c.order_ / r, c.modulus_, pp) == detail::PolyFp{1}) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      gamma = h;
      break;
    }
  }
  if (gamma == 0) throw Error(Errc::ConsistencyFailure, "no primitive root found");

  // Multiplication by gamma is F_p-linear; tabulate images of the basis.
  std::vector<Handle> images(n);
  std::vector<std::uint64_t> pw(n + 1, 1);
  for (int i = 1; i <= n; ++i) pw[i] = pw[i - 1] * p;
  for (int i = 0; i < n; ++i) {
    detail::PolyFp ti(i + 1, 0);
    ti[i] = 1;
    images[i] = from_poly(detail::mulmod_fp(ti, to_poly(gamma), c.modulus_, pp));
  }
  std::vector<std::vector<std::uint32_t>> image_digits(n, std::vector<std::uint32_t>(n, 0));
  for (int i = 0; i < n; ++i) {
    Handle v = images[i];
    for (int j = 0; j < n; ++j) {
      image_digits[i][j] = v % pp;
      v /= pp;
    }
  }
  std::vector<std::uint64_t> acc_digits(n);
  auto times_gamma = [&](Handle a) {
    if (pp == 2) {
      Handle r = 0;
      for (int i = 0; a; ++i, a >>= 1)
        if (a & 1) r ^= images[i];
      return r;
    }
    std::fill(acc_digits.begin(), acc_digits.end(), 0);
    for (int i = 0; i < n && a; ++i) {
      std::uint64_t d = a % pp;
      a /= pp;
      if (!d) continue;
      for (int j = 0; j < n; ++j) acc_digits[j] += d * image_digits[i][j];
    }
    Handle r = 0;
    for (int j = n - 1; j >= 0; --j) r = r * pp + static_cast<Handle>(acc_digits[j] % pp);
    return r;
  };

  c.exp_.assign(c.order_, 0);
  c.log_.assign(size, TowerContext::kNoLog);
  Handle cur = 1;
  for (std::uint64_t k = 0; k < c.order_; ++k) {
    if (c.log_[cur] != TowerContext::kNoLog) throw Error(Errc::ConsistencyFailure, "gamma is not primitive");
    c.exp_[k] = cur;
    c.log_[cur] = static_cast<std::uint32_t>(k);
    cur = times_gamma(cur);
  }
  if (cur != 1) throw Error(Errc::ConsistencyFailure, "exp table did not close");

  // Zech logarithms: zech[k] = log(1 + gamma^k). Adding 1 only touches digit 0.
  c.zech_.assign(c.order_, TowerContext::kNoLog);
  for (std::uint64_t k = 0; k < c.order_; ++k) {
    Handle h = c.exp_[k];
    Handle d0 = h % pp;
    Handle h1 = h - d0 + (d0 + 1) % pp;
    c.zech_[k] = h1 == 0 ? TowerContext::kNoLog : c.log_[h1];
  }

  c.q_pow_mod_order_.resize(m);
  for (int k = 0; k < m; ++k) c.q_pow_mod_order_[k] = num::powmod(c.q_, k, c.order_);
  c.p_pow_mod_order_.resize(n);
  for (int k = 0; k < n; ++k) c.p_pow_mod_order_[k] = num::powmod(p, k, c.order_);

  // Tr_{q^m/p} is F_p-linear: tabulate it on the basis t^i, then extend.
  std::vector<std::uint32_t> basis_trace(n);
  for (int i = 0; i < n; ++i) {
    Handle ti = static_cast<Handle>(pw[i]);
    Handle acc = 0;
    for (int k = 0; k < n; ++k) acc = c.add(acc, c.frobenius_p(ti, k));
    if (acc >= pp) throw Error(Errc::ConsistencyFailure, "absolute trace left F_p");
    basis_trace[i] = acc;
  }
  c.trace_p_.assign(size, 0);
  for (Handle h = 0; h < size; ++h) {
    std::uint64_t acc = 0;
    Handle a = h;
    for (int i = 0; i < n && a; ++i) {
      acc += std::uint64_t{a % pp} * basis_trace[i];
      a /= pp;
    }
    c.trace_p_[h] = static_cast<std::uint32_t>(acc % pp);
  }

  // Tr_{q^m/q}(a) = sum_{i<m} a^{q^i}.
  c.trace_q_.assign(size, 0);
  for (Handle h = 1; h < size; ++h) {
    Handle acc = 0;
    for (int i = 0; i < m; ++i) acc = c.add(acc, c.frobenius(h, i));
    c.trace_q_[h] = acc;
  }

  c.subfield_step_ = c.order_ / (c.q_ - 1);
  c.subfield_.push_back(0);
  for (std::uint64_t k = 0; k < c.q_ - 1; ++k) c.subfield_.push_back(c.exp_[k * c.subfield_step_]);
  std::sort(c.subfield_.begin(), c.subfield_.end());

  for (Handle h = 1; h < size; ++h) {
    if (c.trace_q_[h] == 1) {
      c.unit_trace_ = h;
      break;
    }
  }
  if (c.unit_trace_ == 0) throw Error(Errc::ConsistencyFailure, "relative trace not surjective");
  return ctx;
}

}  // namespace charfield
