#include <gtest/gtest.h>

#include <random>

#include "charfield/polyring.hpp"
#include "oracles.hpp"

using namespace charfield;

namespace {

struct FieldCase {
  std::uint64_t p;
  int s, m;
};

std::string case_name(const testing::TestParamInfo<FieldCase>& i) {
  return "p" + std::to_string(i.param.p) + "_s" + std::to_string(i.param.s) + "_m" + std::to_string(i.param.m);
}

PolyQ random_polyq(const TowerContext& ctx, int deg, std::mt19937_64& rng, bool monic = false) {
  std::vector<Handle> v(deg + 1);
  for (auto& c : v) c = ctx.subfield_q()[rng() % ctx.q()];
  if (monic) v.back() = 1;
  else if (v.back() == 0) v.back() = ctx.subfield_q().back();
  return PolyQ(&ctx, v);
}

oracle::NaivePoly naive(const oracle::NaiveField& F, const PolyQ& f) {
  return {&F, std::vector<std::uint64_t>(f.coeffs().begin(), f.coeffs().end())};
}

bool naive_irreducible(const oracle::NaiveField& F, const PolyQ& f) {
  const int d = f.degree();
  if (d <= 0) return false;
  for (const auto& h : oracle::monic_polys_up_to(F, d / 2))
    if (h.degree() >= 1 && oracle::poly_divides(h, naive(F, f))) return false;
  return true;
}

/// Distinct irreducible factors of x^m - 1 (p not dividing m): sum over d | m of phi(d)/ord_d(q).
std::size_t cyclotomic_factor_count(std::uint64_t q, int m) {
  std::size_t c = 0;
  for (auto d : oracle::divisors(static_cast<std::uint64_t>(m))) {
    std::uint64_t o = 1, x = q % d;
    if (d == 1) o = 1;
    else
      while (x != 1) x = x * q % d, ++o;
    c += oracle::phi(d) / o;
  }
  return c;
}

class PolyOracle : public testing::TestWithParam<FieldCase> {
 protected:
  void SetUp() override {
    ctx = build_tower(GetParam().p, GetParam().s, GetParam().m);
    F = std::make_unique<oracle::NaiveField>(*ctx);
  }
  ContextPtr ctx;
  std::unique_ptr<oracle::NaiveField> F;
};

}  // namespace

TEST_P(PolyOracle, DivisionIdentity) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const PolyQ a = random_polyq(*ctx, static_cast<int>(rng() % 9), rng);
    const PolyQ b = random_polyq(*ctx, static_cast<int>(rng() % 5), rng);
    const auto [q, r] = divmod(a, b);
    EXPECT_EQ(q * b + r, a);
    EXPECT_LT(r.degree(), b.degree());
    EXPECT_EQ(std::vector<std::uint64_t>(r.coeffs().begin(), r.coeffs().end()), oracle::trimmed(oracle::poly_mod(naive(*F, a), naive(*F, b))).c) << a.to_string() << " % " << b.to_string();
    const PolyQ g = gcd(a, b);
    EXPECT_TRUE(g.is_monic());
    EXPECT_TRUE(divides(g, a) && divides(g, b));
    EXPECT_EQ(g.degree(), oracle::poly_gcd(naive(*F, a), naive(*F, b)).degree());
  }
}

TEST_P(PolyOracle, RingAxiomsOnSamples) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    const PolyQ a = random_polyq(*ctx, static_cast<int>(rng() % 6), rng), b = random_polyq(*ctx, static_cast<int>(rng() % 6), rng),
                c = random_polyq(*ctx, static_cast<int>(rng() % 6), rng);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a - a, PolyQ::zero(ctx.get()));
    EXPECT_EQ((a * b).degree(), a.degree() + b.degree());
    const Handle t = ctx->subfield_q()[rng() % ctx->q()];
    EXPECT_EQ((a * b).eval(t), ctx->mul(a.eval(t), b.eval(t)));
  }
}

TEST_P(PolyOracle, FactorizationOfRandomPolys) {
  std::mt19937_64 rng(3);
  const int max_deg = ctx->q() <= 4 ? 9 : 6;
  for (int k = 0; k < 40; ++k) {
    PolyQ f = random_polyq(*ctx, 1 + static_cast<int>(rng() % max_deg), rng);
    if (k % 4 == 0) f = f * f;  // repeated factors
    const auto fac = factor_poly(f, rng());
    EXPECT_EQ(fac.product(), f);
    for (const auto& [g, e] : fac.factors) {
      EXPECT_TRUE(g.is_monic());
      EXPECT_GE(e, 1);
      EXPECT_TRUE(naive_irreducible(*F, g)) << g.to_string();
    }
    for (std::size_t i = 1; i < fac.factors.size(); ++i) EXPECT_TRUE(fac.factors[i - 1].first < fac.factors[i].first);
  }
}

TEST_P(PolyOracle, FactorizationIsSeedIndependent) {
  std::mt19937_64 rng(4);
  const PolyQ f = random_polyq(*ctx, 8, rng) * random_polyq(*ctx, 3, rng);
  const auto a = factor_poly(f, 1), b = factor_poly(f, 99);
  ASSERT_EQ(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < a.factors.size(); ++i) EXPECT_EQ(a.factors[i], b.factors[i]);
}

TEST_P(PolyOracle, IrreducibilityTestMatchesTrialDivision) {
  for (const auto& h : oracle::monic_polys_up_to(*F, ctx->q() <= 3 ? 5 : 3)) {
    if (h.degree() < 1) continue;
    const PolyQ f(ctx.get(), std::vector<Handle>(h.c.begin(), h.c.end()));
    EXPECT_EQ(is_irreducible(f), naive_irreducible(*F, f)) << f.to_string();
  }
}

TEST_P(PolyOracle, XmMinusOneFactorsAndLattice) {
  for (int m = 1; m <= 8; ++m) {
    const PolyQ xm1 = x_pow_minus_one(*ctx, m);
    const auto fac = factor_poly(xm1);
    EXPECT_EQ(fac.product(), xm1);
    EXPECT_EQ(fac.distinct_count(), cyclotomic_factor_count(ctx->q(), radical_exponent(m, ctx->p())));
    const int m0 = radical_exponent(m, ctx->p());
    for (const auto& [g, e] : fac.factors) EXPECT_EQ(e, m / m0);
    EXPECT_EQ(xm1_radical(*ctx, m).degree(), m0);

    const DivisorLattice lat = divisor_lattice(fac);
    const bool brute = oracle::ipow(ctx->q(), m) <= 4096;
    if (brute) { EXPECT_EQ(lat.all.size(), oracle::monic_divisors(naive(*F, xm1)).size()); }
    EXPECT_EQ(lat.W, std::uint64_t{1} << fac.distinct_count());
    EXPECT_EQ(lat.squarefree.size(), lat.W);
    EXPECT_EQ(lat.all[lat.top()].poly, xm1);
    EXPECT_TRUE(lat.all.front().poly.is_one());
    for (std::size_t i = 0; i < lat.all.size(); ++i) {
      const auto& en = lat.all[i];
      if (i) { EXPECT_TRUE(lat.all[i - 1].poly < en.poly); }
      EXPECT_TRUE(divides(en.poly, xm1));
      EXPECT_EQ(lat.index_of(en.poly), i);
      if (brute) { EXPECT_EQ(en.phi, oracle::poly_phi(naive(*F, en.poly))) << en.poly.to_string(); }
      EXPECT_EQ(en.phi, euler_phi_poly(en.poly));
      EXPECT_EQ(en.mu, mobius_poly(en.poly));
      for (std::size_t j = 0; j < lat.all.size(); ++j) EXPECT_EQ(lat.divides(i, j), divides(en.poly, lat.all[j].poly));
    }
    EXPECT_THROW(lat.index_of(PolyQ::monomial(ctx.get(), 1)), Error);
  }
}

TEST_P(PolyOracle, LinearizedActionAndMinimalPolynomial) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 60; ++k) {
    const PolyQ g = random_polyq(*ctx, static_cast<int>(rng() % 5), rng);
    const Handle a = static_cast<Handle>(rng() % ctx->size());
    std::vector<std::uint64_t> gc(g.coeffs().begin(), g.coeffs().end());
    EXPECT_EQ(linearized_apply(g, a), F->linearized(gc, a));
  }
  for (Handle th = 0; th < ctx->size(); th += 1 + static_cast<Handle>(ctx->size() / 97)) {
    const PolyQ mp = minimal_polynomial(*ctx, th);
    const auto ref = oracle::minimal_polynomial(*F, th);
    EXPECT_EQ(std::vector<std::uint64_t>(mp.coeffs().begin(), mp.coeffs().end()), ref);
    EXPECT_TRUE(is_irreducible(mp));
    EXPECT_EQ(PolyE(ctx.get(), mp.coeffs()).eval(th), 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(SmallTowers, PolyOracle,
                         testing::Values(FieldCase{2, 1, 2}, FieldCase{3, 1, 2}, FieldCase{2, 2, 2}, FieldCase{5, 1, 2},
                                         FieldCase{7, 1, 2}, FieldCase{2, 3, 2}, FieldCase{3, 2, 2}, FieldCase{2, 1, 6}),
                         case_name);

TEST(PolyErrors, CoefficientsOutsideSubfieldRejected) {
  const auto ctx = build_tower(2, 1, 3);
  EXPECT_THROW(PolyQ(ctx.get(), {2}), Error);  // t is not in F_2
  EXPECT_NO_THROW(PolyE(ctx.get(), {2}));
  EXPECT_THROW(PolyE(ctx.get(), {8}), Error);
  EXPECT_THROW(PolyQ(nullptr, {1}), Error);
}

TEST(PolyErrors, DivisionAndFactoringZero) {
  const auto ctx = build_tower(3, 1, 2);
  const PolyQ z = PolyQ::zero(ctx.get()), x = PolyQ::monomial(ctx.get(), 1);
  EXPECT_THROW(divmod(x, z), Error);
  try {
    factor_poly(z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroPolynomial);
  }
  EXPECT_TRUE(gcd(z, z).is_zero());
  EXPECT_EQ(gcd(x.scaled(2), z), x);
  EXPECT_TRUE(divides(z, z));
  EXPECT_FALSE(divides(z, x));
  EXPECT_THROW(radical_exponent(0, 3), Error);
}

TEST(PolyBasics, TrimOrderAndPrinting) {
  const auto ctx = build_tower(3, 1, 2);
  const PolyQ f(ctx.get(), {1, 2, 0, 0});
  EXPECT_EQ(f.degree(), 1);
  EXPECT_EQ(PolyQ::zero(ctx.get()).degree(), -1);
  EXPECT_TRUE(PolyQ::zero(ctx.get()) < PolyQ::one(ctx.get()));
  EXPECT_TRUE(PolyQ(ctx.get(), {2, 2}) < PolyQ(ctx.get(), {0, 0, 1}));
  EXPECT_TRUE(PolyQ(ctx.get(), {2, 1}) < PolyQ(ctx.get(), {0, 2}));
  EXPECT_EQ(f.monic().lead(), 1u);
  EXPECT_EQ(f.derivative(), PolyQ::constant(ctx.get(), 2));
  EXPECT_EQ(PolyQ::monomial(ctx.get(), 3).derivative(), PolyQ::zero(ctx.get()));  // 3 x^2 = 0 in characteristic 3
  EXPECT_FALSE(f.to_string().empty());
  EXPECT_EQ(radical_exponent(12, 2), 3);
  EXPECT_EQ(radical_exponent(9, 3), 1);
  EXPECT_EQ(radical_exponent(10, 3), 10);
}

TEST(PolyArithmeticFunctions, PhiAndMobiusOnKnownShapes) {
  const auto ctx = build_tower(2, 1, 2);
  // x^4 - 1 = (x + 1)^4 over F_2: Phi = 2^4 - 2^3, mu = 0
  const PolyQ f = x_pow_minus_one(*ctx, 4);
  EXPECT_EQ(euler_phi_poly(f), 8u);
  EXPECT_EQ(mobius_poly(f), 0);
  // x^3 - 1 = (x + 1)(x^2 + x + 1): Phi = 1 * 3, mu = 1
  const PolyQ g = x_pow_minus_one(*ctx, 3);
  EXPECT_EQ(euler_phi_poly(g), 3u);
  EXPECT_EQ(mobius_poly(g), 1);
  EXPECT_EQ(mobius_poly(PolyQ::one(ctx.get())), 1);
}
