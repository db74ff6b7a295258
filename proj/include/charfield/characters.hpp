#pragma once

// Multiplicative characters chi_j(gamma^k) = exp(2 pi i jk / (q^m - 1)) and
// additive characters psi_c(a) = exp(2 pi i Tr_{q^m/p}(ca) / p).

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <vector>

#include "charfield/error.hpp"
#include "charfield/ff_core.hpp"
#include "charfield/polyring.hpp"

namespace charfield {

using cplx = std::complex<double>;

inline constexpr double kUnitTolerance = 1e-9;

/// exp(2 pi i k / n); exactly 1 when k = 0 mod n.
inline cplx unit_root(std::uint64_t k, std::uint64_t n) {
  k %= n;
  if (k == 0) return {1.0, 0.0};
  const double a = 2.0 * std::numbers::pi * (static_cast<double>(k) / static_cast<double>(n));
  return {std::cos(a), std::sin(a)};
}

inline bool is_one(cplx z, double tol = kUnitTolerance) { return std::abs(z - cplx(1.0, 0.0)) < tol; }

/// All n-th roots of unity, indexed by exponent.
class RootTable {
 public:
  RootTable() = default;
  explicit RootTable(std::uint64_t n) : n_(n), v_(n) {
    for (std::uint64_t k = 0; k < n; ++k) v_[k] = unit_root(k, n);
  }
  std::uint64_t n() const { return n_; }
  const cplx& operator[](std::uint64_t k) const { return v_[k % n_]; }
  const cplx& at_reduced(std::uint64_t k) const { return v_[k]; }

 private:
  std::uint64_t n_ = 1;
  std::vector<cplx> v_;
};

struct MultChar {
  const TowerContext* ctx = nullptr;
  std::uint64_t j = 0;

  bool trivial() const { return j == 0; }
  std::uint64_t order() const { return ctx->group_order() / std::gcd(j, ctx->group_order()); }
  cplx operator()(Handle a) const {
    if (a == 0) return j == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    const std::uint64_t n = ctx->group_order();
    return unit_root(static_cast<std::uint64_t>(num::mulmod(j, ctx->log_unchecked(a), n)), n);
  }
  MultChar conj() const { return {ctx, (ctx->group_order() - j) % ctx->group_order()}; }
};

struct AddChar {
  const TowerContext* ctx = nullptr;
  Handle c = 0;

  bool trivial() const { return c == 0; }
  cplx operator()(Handle a) const { return unit_root(ctx->trace_to_prime(ctx->mul(c, a)), ctx->p()); }
  AddChar conj() const { return {ctx, ctx->neg(c)}; }
};

/// Character of F_q: psi_b(t) = exp(2 pi i Tr_{q/p}(bt) / p), b in F_q.
struct SubfieldAddChar {
  const TowerContext* ctx = nullptr;
  Handle b = 0;

  bool trivial() const { return b == 0; }
  cplx operator()(Handle t) const { return unit_root(ctx->subfield_trace_to_prime(ctx->mul(b, t)), ctx->p()); }
  SubfieldAddChar conj() const { return {ctx, ctx->neg(b)}; }
  /// psi_b o Tr_{q^m/q} as a character of F_{q^m}.
  AddChar lift() const { return {ctx, b}; }
};

inline MultChar make_mult_char(const TowerContext& ctx, std::uint64_t j) {
  if (j >= ctx.group_order()) throw Error(Errc::InvalidArgument, "character index out of range");
  return {&ctx, j};
}

inline SubfieldAddChar make_subfield_add_char(const TowerContext& ctx, Handle b) {
  if (b >= ctx.size() || !ctx.in_subfield(b)) throw Error(Errc::InvalidArgument, "additive parameter " + std::to_string(b) + " is not in F_q");
  return {&ctx, b};
}

/// Characters of one tower together with the divisor lattice of x^m - 1,
/// shared root tables and the lazily built table of F_q-orders of all psi_c.
class CharacterSystem {
 public:
  explicit CharacterSystem(ContextPtr ctx, std::uint64_t seed = 0)
      : ctx_(std::move(ctx)),
        lattice_(divisor_lattice(x_pow_minus_one(*ctx_, ctx_->m()), seed)),
        roots_n_(ctx_->group_order()),
        roots_p_(ctx_->p()) {
    for (std::size_t i = 0; i < lattice_.all.size(); ++i)
      if (lattice_.all[i].poly == PolyQ::monomial(ctx_.get(), 1) - PolyQ::one(ctx_.get())) x_minus_1_ = i;
    g1_ = lattice_.index_of(x_pow_minus_one(*ctx_, ctx_->m()) / (PolyQ::monomial(ctx_.get(), 1) - PolyQ::one(ctx_.get())));
    top_ = lattice_.top();
    basis_images_.resize(lattice_.all.size());
    for (std::size_t g = 0; g < lattice_.all.size(); ++g)
      for (int i = 0; i < ctx_->degree(); ++i) basis_images_[g].push_back(linearized_apply(lattice_.all[g].poly, ctx_->basis_element(i)));
  }

  const TowerContext& ctx() const { return *ctx_; }
  const ContextPtr& ctx_ptr() const { return ctx_; }
  const DivisorLattice& lattice() const { return lattice_; }
  const RootTable& roots_n() const { return roots_n_; }
  const RootTable& roots_p() const { return roots_p_; }
  std::size_t index_x_minus_1() const { return x_minus_1_; }
  /// Lattice index of (x^m - 1)/(x - 1).
  std::size_t index_g1() const { return g1_; }
  std::size_t index_top() const { return top_; }

  cplx chi(std::uint64_t j, Handle a) const {
    if (a == 0) return j == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    return roots_n_.at_reduced(num::mulmod(j, ctx_->log_unchecked(a), ctx_->group_order()));
  }
  cplx psi(Handle c, Handle a) const { return roots_p_.at_reduced(ctx_->trace_to_prime(ctx_->mul(c, a))); }
  cplx psi_sub(Handle b, Handle t) const { return roots_p_.at_reduced(ctx_->subfield_trace_to_prime(ctx_->mul(b, t))); }

  /// True when psi_c o g is trivial, tested on the F_p-basis t^i.
  bool annihilates_char(Handle c, std::size_t g_index) const {
    for (Handle img : basis_images_[g_index])
      if (ctx_->trace_to_prime(ctx_->mul(c, img)) != 0) return false;
    return true;
  }

  /// Lattice index of Ord_q(psi_c): the first divisor in degree order killing psi_c.
  std::size_t add_char_order_index(Handle c) const {
    ensure_orders();
    return add_order_[c];
  }
  const PolyQ& add_char_order(Handle c) const { return lattice_.all[add_char_order_index(c)].poly; }

 private:
  void ensure_orders() const {
    std::call_once(orders_once_, [this] {
      const std::uint64_t n = ctx_->size();
      add_order_.assign(n, 0);
      for (Handle c = 0; c < n; ++c) {
        std::size_t i = 0;
        while (!annihilates_char(c, i)) ++i;
        add_order_[c] = static_cast<std::uint32_t>(i);
      }
    });
  }

  ContextPtr ctx_;
  DivisorLattice lattice_;
  RootTable roots_n_, roots_p_;
  std::size_t x_minus_1_ = 0, g1_ = 0, top_ = 0;
  std::vector<std::vector<Handle>> basis_images_;  // g o t^i per lattice entry
  mutable std::once_flag orders_once_;
  mutable std::vector<std::uint32_t> add_order_;
};

inline PolyQ fq_order_of_add_char(const CharacterSystem& sys, const AddChar& psi) {
  const auto& lat = sys.lattice();
  for (std::size_t i = 0; i < lat.all.size(); ++i)
    if (sys.annihilates_char(psi.c, i)) return lat.all[i].poly;
  throw Error(Errc::ConsistencyFailure, "x^m - 1 does not annihilate the character");
}

inline std::vector<MultChar> enumerate_mult_chars_of_order(const TowerContext& ctx, std::uint64_t d) {
  const std::uint64_t n = ctx.group_order();
  if (d == 0 || n % d != 0) throw Error(Errc::NotADivisor, std::to_string(d) + " does not divide " + std::to_string(n));
  std::vector<MultChar> out;
  for (std::uint64_t k = 0; k < d; ++k)
    if (std::gcd(k, d) == 1) out.push_back({&ctx, k * (n / d)});
  return out;
}

inline std::vector<AddChar> enumerate_add_chars_of_fq_order(const CharacterSystem& sys, const PolyQ& f) {
  if (!f.is_monic()) throw Error(Errc::NotADivisor, "F_q-order must be monic");
  const std::size_t idx = sys.lattice().index_of(f);
  std::vector<AddChar> out;
  for (Handle c = 0; c < sys.ctx().size(); ++c)
    if (sys.add_char_order_index(c) == idx) out.push_back({&sys.ctx(), c});
  return out;
}

/// The three conditions whose equivalence is asserted for every c.
struct TraceTrivialityTriple {
  bool restriction_trivial = false;  // psi_c is trivial on F_q
  bool trace_zero = false;           // Tr_{q^m/q}(c) = 0
  bool order_divides_g1 = false;     // Ord_q(psi_c) | (x^m - 1)/(x - 1)
  bool agree() const { return restriction_trivial == trace_zero && trace_zero == order_divides_g1; }
};

inline TraceTrivialityTriple trace_triviality_triple(const CharacterSystem& sys, Handle c) {
  const TowerContext& ctx = sys.ctx();
  TraceTrivialityTriple r;
  r.restriction_trivial = true;
  for (Handle t : ctx.subfield_q())
    if (!is_one(sys.psi(c, t))) {
      r.restriction_trivial = false;
      break;
    }
  r.trace_zero = ctx.trace_to_subfield(c) == 0;
  r.order_divides_g1 = sys.lattice().divides(sys.add_char_order_index(c), sys.index_g1());
  return r;
}

}  // namespace charfield
