#pragma once

// e-free and g-free elements: direct order-based tests and the character sum
// indicator functions rho_e and kappa_g.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "charfield/characters.hpp"
#include "charfield/error.hpp"
#include "charfield/ff_core.hpp"
#include "charfield/numutil.hpp"
#include "charfield/polyring.hpp"

namespace charfield {

inline constexpr double kIndicatorTolerance = 1e-6;

/// Ord_q(alpha) as a lattice index: the first divisor g of x^m - 1 with g o alpha = 0.
inline std::size_t fq_order_index_of_element(const CharacterSystem& sys, Handle alpha) {
  const auto& lat = sys.lattice();
  for (std::size_t i = 0; i < lat.all.size(); ++i)
    if (linearized_apply(lat.all[i].poly, alpha) == 0) return i;
  throw Error(Errc::ConsistencyFailure, "x^m - 1 does not annihilate element");
}

inline PolyQ fq_order_of_element(const CharacterSystem& sys, Handle alpha) {
  return sys.lattice().all[fq_order_index_of_element(sys, alpha)].poly;
}

/// Normality via the maximal proper divisors: alpha is normal iff no
/// (x^m - 1)/pi annihilates it.
class NormalityTest {
 public:
  explicit NormalityTest(const CharacterSystem& sys) : ctx_(&sys.ctx()) {
    const auto& lat = sys.lattice();
    const PolyQ top = lat.all[lat.top()].poly;
    for (const auto& [pi, e] : lat.fac.factors) cofactors_.push_back(top / pi);
  }
  bool operator()(Handle alpha) const {
    for (const auto& h : cofactors_)
      if (linearized_apply(h, alpha) == 0) return false;
    return true;
  }

 private:
  const TowerContext* ctx_;
  std::vector<PolyQ> cofactors_;
};

inline bool is_efree_direct(const TowerContext& ctx, Handle alpha, std::uint64_t e) {
  if (alpha == 0) throw Error(Errc::ZeroElement, "freeness of zero");
  const std::uint64_t n = ctx.group_order();
  if (e == 0 || n % e != 0) throw Error(Errc::NotADivisor, std::to_string(e) + " does not divide q^m - 1");
  return std::gcd(e, n / ctx.mult_order(alpha)) == 1;
}

/// gcd(g, (x^m - 1)/Ord_q(alpha)) = 1, read off the exponent vectors.
inline bool is_gfree_direct_index(const CharacterSystem& sys, Handle alpha, std::size_t g_index) {
  const auto& lat = sys.lattice();
  const auto& ord = lat.all[fq_order_index_of_element(sys, alpha)].exps;
  const auto& top = lat.all[lat.top()].exps;
  const auto& g = lat.all[g_index].exps;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] > 0 && top[i] - ord[i] > 0) return false;
  return true;
}

inline bool is_gfree_direct(const CharacterSystem& sys, Handle alpha, const PolyQ& g) {
  if (!g.is_monic()) throw Error(Errc::NotADivisor, "g must be monic");
  return is_gfree_direct_index(sys, alpha, sys.lattice().index_of(g));
}

struct Rational {
  std::uint64_t num = 0, den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct FreenessParams {
  std::uint64_t e = 1;
  PolyQ g;
  std::size_t g_index = 0;
  Rational epsilon_e;      // phi(e)/e
  Rational varepsilon_g;   // Phi(g)/q^deg g
};

inline Rational epsilon_int(const num::IntFactorization& n_fac, std::uint64_t e) {
  return {num::euler_phi_of_divisor(n_fac, e), e};
}

inline Rational varepsilon_poly(const CharacterSystem& sys, std::size_t g_index) {
  const auto& ent = sys.lattice().all[g_index];
  std::uint64_t qd = 1;
  for (int i = 0; i < ent.poly.degree(); ++i) qd *= sys.ctx().q();
  return {ent.phi, qd};
}

inline FreenessParams make_freeness_params(const CharacterSystem& sys, std::uint64_t e, const PolyQ& g) {
  const TowerContext& ctx = sys.ctx();
  if (e == 0 || ctx.group_order() % e != 0) throw Error(Errc::NotADivisor, std::to_string(e) + " does not divide q^m - 1");
  if (!g.is_monic()) throw Error(Errc::NotADivisor, "g must be monic");
  FreenessParams p;
  p.e = e;
  p.g = g;
  p.g_index = sys.lattice().index_of(g);
  p.epsilon_e = epsilon_int(ctx.group_order_factorization(), e);
  p.varepsilon_g = varepsilon_poly(sys, p.g_index);
  return p;
}

/// Inner character sums of one element: for every squarefree d | q^m - 1 the
/// sum of chi(alpha) over chi of order d, and for every lattice entry f the
/// sum of psi(alpha) over psi of F_q-order f.
struct CharacterSums {
  std::vector<std::uint64_t> sqfree_divisors;  // of q^m - 1, ascending
  std::vector<cplx> mult;                      // parallel to sqfree_divisors
  std::vector<cplx> add;                       // indexed by lattice entry
};

inline CharacterSums character_sums(const CharacterSystem& sys, Handle alpha) {
  const TowerContext& ctx = sys.ctx();
  const std::uint64_t n = ctx.group_order();
  CharacterSums s;
  s.sqfree_divisors = num::squarefree_divisors(ctx.group_order_factorization());
  s.mult.assign(s.sqfree_divisors.size(), cplx{});
  if (alpha != 0) {
    const std::uint64_t L = ctx.log_unchecked(alpha);
    for (std::size_t i = 0; i < s.sqfree_divisors.size(); ++i) {
      const std::uint64_t d = s.sqfree_divisors[i];
      const std::uint64_t step = num::mulmod(n / d, L, n);
      cplx acc{};
      for (std::uint64_t k = 0; k < d; ++k)
        if (std::gcd(k, d) == 1) acc += sys.roots_n().at_reduced(num::mulmod(k, step, n));
      s.mult[i] = acc;
    }
  }
  s.add.assign(sys.lattice().all.size(), cplx{});
  for (Handle c = 0; c < ctx.size(); ++c) s.add[sys.add_char_order_index(c)] += sys.psi(c, alpha);
  return s;
}

inline double rho_from_sums(const CharacterSystem& sys, const CharacterSums& s, std::uint64_t e) {
  const auto& fac = sys.ctx().group_order_factorization();
  cplx acc{};
  for (std::size_t i = 0; i < s.sqfree_divisors.size(); ++i) {
    const std::uint64_t d = s.sqfree_divisors[i];
    if (e % d != 0) continue;
    acc += s.mult[i] * (static_cast<double>(num::mobius_of_divisor(fac, d)) / static_cast<double>(num::euler_phi_of_divisor(fac, d)));
  }
  acc *= epsilon_int(fac, e).value();
  if (std::abs(acc.imag()) > kIndicatorTolerance) throw Error(Errc::ConsistencyFailure, "rho has imaginary part " + std::to_string(acc.imag()));
  return acc.real();
}

inline double kappa_from_sums(const CharacterSystem& sys, const CharacterSums& s, std::size_t g_index) {
  const auto& lat = sys.lattice();
  cplx acc{};
  for (std::size_t f : lat.squarefree) {
    if (!lat.divides(f, g_index)) continue;
    acc += s.add[f] * (static_cast<double>(lat.all[f].mu) / static_cast<double>(lat.all[f].phi));
  }
  acc *= varepsilon_poly(sys, g_index).value();
  if (std::abs(acc.imag()) > kIndicatorTolerance) throw Error(Errc::ConsistencyFailure, "kappa has imaginary part " + std::to_string(acc.imag()));
  return acc.real();
}

inline double rho_char_formula(const CharacterSystem& sys, Handle alpha, std::uint64_t e) {
  if (alpha == 0) throw Error(Errc::ZeroElement, "rho of zero");
  if (e == 0 || sys.ctx().group_order() % e != 0) throw Error(Errc::NotADivisor, std::to_string(e) + " does not divide q^m - 1");
  return rho_from_sums(sys, character_sums(sys, alpha), e);
}

inline double kappa_char_formula(const CharacterSystem& sys, Handle alpha, const PolyQ& g) {
  if (!g.is_monic()) throw Error(Errc::NotADivisor, "g must be monic");
  return kappa_from_sums(sys, character_sums(sys, alpha), sys.lattice().index_of(g));
}

/// Maps a formula value to {0, 1}; anything farther than the tolerance is a
/// consistency failure.
inline bool snap_indicator(double v, double tol = kIndicatorTolerance) {
  if (std::abs(v) < tol) return false;
  if (std::abs(v - 1.0) < tol) return true;
  throw Error(Errc::ConsistencyFailure, "indicator value " + std::to_string(v) + " is not within tolerance of 0 or 1");
}

struct GFreeEquivalenceReport {
  bool equal = true;
  std::vector<Handle> counterexamples;
  std::uint64_t free_count = 0;
  std::uint64_t generator_count = 0;
};

/// For m prime and q primitive mod m: (x^m - 1)/(x - 1)-free elements are
/// exactly the extension generators.
inline GFreeEquivalenceReport lemma_gfree_equivalence(const CharacterSystem& sys) {
  const TowerContext& ctx = sys.ctx();
  const auto m = static_cast<std::uint64_t>(ctx.m());
  if (!num::is_prime(m)) throw Error(Errc::PreconditionFailed, "m = " + std::to_string(m) + " is not prime");
  if (!num::is_primitive_mod(ctx.q(), m))
    throw Error(Errc::PreconditionFailed, "q = " + std::to_string(ctx.q()) + " is not primitive modulo " + std::to_string(m));
  GFreeEquivalenceReport r;
  for (Handle a = 0; a < ctx.size(); ++a) {
    const bool f = is_gfree_direct_index(sys, a, sys.index_g1());
    const bool g = ctx.is_extension_generator(a);
    r.free_count += f;
    r.generator_count += g;
    if (f != g) r.counterexamples.push_back(a);
  }
  r.equal = r.counterexamples.empty();
  return r;
}

}  // namespace charfield
