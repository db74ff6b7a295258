#include <gtest/gtest.h>

#include "charfield/freeness.hpp"
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

class FreenessOracle : public testing::TestWithParam<FieldCase> {
 protected:
  void SetUp() override {
    ctx = build_tower(GetParam().p, GetParam().s, GetParam().m);
    sys = std::make_unique<CharacterSystem>(ctx);
    F = std::make_unique<oracle::NaiveField>(*ctx);
  }
  oracle::NaivePoly naive(const PolyQ& f) const { return {F.get(), std::vector<std::uint64_t>(f.coeffs().begin(), f.coeffs().end())}; }
  ContextPtr ctx;
  std::unique_ptr<CharacterSystem> sys;
  std::unique_ptr<oracle::NaiveField> F;
};

}  // namespace

TEST_P(FreenessOracle, EFreeMatchesRootSearch) {
  const std::uint64_t n = ctx->group_order();
  for (Handle a = 1; a < ctx->size(); ++a)
    for (auto e : oracle::divisors(n)) ASSERT_EQ(is_efree_direct(*ctx, a, e), oracle::is_efree(*F, a, e)) << "a=" << a << " e=" << e;
}

TEST_P(FreenessOracle, GFreeMatchesPreimageSearch) {
  for (const auto& en : sys->lattice().all)
    for (Handle a = 0; a < ctx->size(); ++a)
      ASSERT_EQ(is_gfree_direct(*sys, a, en.poly), oracle::is_gfree(*F, a, naive(en.poly))) << "a=" << a << " g=" << en.poly.to_string();
}

TEST_P(FreenessOracle, NormalityAndFqOrder) {
  const NormalityTest normal(*sys);
  const auto& lat = sys->lattice();
  for (Handle a = 0; a < ctx->size(); ++a) {
    EXPECT_EQ(normal(a), F->is_normal(a)) << a;
    EXPECT_EQ(normal(a), is_gfree_direct_index(*sys, a, lat.top()));
    const PolyQ ord = fq_order_of_element(*sys, a);
    EXPECT_EQ(linearized_apply(ord, a), 0u);
    for (const auto& en : lat.all)
      if (linearized_apply(en.poly, a) == 0) { EXPECT_TRUE(divides(ord, en.poly)); }
  }
}

TEST_P(FreenessOracle, CharacterFormulasAreIndicators) {
  const std::uint64_t n = ctx->group_order();
  const auto& lat = sys->lattice();
  std::vector<double> rho_sum(oracle::divisors(n).size(), 0), kappa_sum(lat.all.size(), 0);
  for (Handle a = 1; a < ctx->size(); ++a) {
    const CharacterSums s = character_sums(*sys, a);
    const auto divs = oracle::divisors(n);
    for (std::size_t i = 0; i < divs.size(); ++i) {
      const double r = rho_from_sums(*sys, s, divs[i]);
      ASSERT_LT(std::abs(r - (is_efree_direct(*ctx, a, divs[i]) ? 1.0 : 0.0)), 1e-6) << "a=" << a << " e=" << divs[i];
      rho_sum[i] += r;
    }
    for (std::size_t g = 0; g < lat.all.size(); ++g) {
      const double k = kappa_from_sums(*sys, s, g);
      ASSERT_LT(std::abs(k - (is_gfree_direct_index(*sys, a, g) ? 1.0 : 0.0)), 1e-6) << "a=" << a << " g=" << lat.all[g].poly.to_string();
      kappa_sum[g] += k;
    }
  }
  // zero is g-free only for g = 1
  for (std::size_t g = 0; g < lat.all.size(); ++g) kappa_sum[g] += kappa_char_formula(*sys, 0, lat.all[g].poly);
  EXPECT_LT(std::abs(rho_sum.back() - static_cast<double>(oracle::phi(n))), 1e-6);
  EXPECT_LT(std::abs(kappa_sum[lat.top()] - static_cast<double>(lat.all[lat.top()].phi)), 1e-6);
  EXPECT_LT(std::abs(kappa_sum[0] - static_cast<double>(ctx->size())), 1e-6);
}

TEST_P(FreenessOracle, EpsilonValues) {
  const auto& nfac = ctx->group_order_factorization();
  for (auto e : oracle::divisors(ctx->group_order())) {
    const Rational r = epsilon_int(nfac, e);
    EXPECT_NEAR(r.value(), static_cast<double>(oracle::phi(e)) / static_cast<double>(e), 1e-12);
  }
  const auto& lat = sys->lattice();
  for (std::size_t g = 0; g < lat.all.size(); ++g) {
    const double expect = static_cast<double>(lat.all[g].phi) / static_cast<double>(oracle::ipow(ctx->q(), lat.all[g].poly.degree()));
    EXPECT_NEAR(varepsilon_poly(*sys, g).value(), expect, 1e-12);
  }
  const FreenessParams fp = make_freeness_params(*sys, ctx->group_order(), x_pow_minus_one(*ctx, ctx->m()));
  EXPECT_EQ(fp.g_index, lat.top());
}

INSTANTIATE_TEST_SUITE_P(SmallTowers, FreenessOracle,
                         testing::Values(FieldCase{2, 1, 2}, FieldCase{2, 1, 3}, FieldCase{3, 1, 2}, FieldCase{2, 2, 2},
                                         FieldCase{2, 1, 4}, FieldCase{3, 1, 3}, FieldCase{5, 1, 2}, FieldCase{7, 1, 2},
                                         FieldCase{2, 1, 6}),
                         case_name);

TEST(GFreeEquivalence, GeneratorsAreExactlyG1Free) {
  for (auto [p, s, m] : std::vector<std::tuple<int, int, int>>{{2, 1, 3}, {5, 1, 3}, {2, 1, 5}, {3, 1, 5}}) {
    const auto ctx = build_tower(p, s, m);
    const CharacterSystem sys(ctx);
    const auto r = lemma_gfree_equivalence(sys);
    EXPECT_TRUE(r.equal);
    EXPECT_TRUE(r.counterexamples.empty());
    EXPECT_EQ(r.free_count, r.generator_count);
    EXPECT_EQ(r.generator_count, ctx->extension_generators().size());
  }
}

TEST(GFreeEquivalence, PreconditionsEnforced) {
  auto code = [](std::uint64_t p, int s, int m) {
    const auto ctx = build_tower(p, s, m);
    const CharacterSystem sys(ctx);
    try {
      lemma_gfree_equivalence(sys);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ConsistencyFailure;
  };
  EXPECT_EQ(code(2, 1, 4), Errc::PreconditionFailed);  // m not prime
  EXPECT_EQ(code(2, 2, 3), Errc::PreconditionFailed);  // 4 = 1 mod 3
  EXPECT_EQ(code(3, 1, 3), Errc::PreconditionFailed);  // 3 = 0 mod 3
}

TEST(FreenessErrors, ZeroAndNonDivisors) {
  const auto ctx = build_tower(3, 1, 2);
  const CharacterSystem sys(ctx);
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ConsistencyFailure;
  };
  EXPECT_EQ(code([&] { is_efree_direct(*ctx, 0, 2); }), Errc::ZeroElement);
  EXPECT_EQ(code([&] { is_efree_direct(*ctx, 1, 3); }), Errc::NotADivisor);
  EXPECT_EQ(code([&] { is_efree_direct(*ctx, 1, 0); }), Errc::NotADivisor);
  EXPECT_EQ(code([&] { rho_char_formula(sys, 0, 2); }), Errc::ZeroElement);
  EXPECT_EQ(code([&] { rho_char_formula(sys, 1, 5); }), Errc::NotADivisor);
  EXPECT_EQ(code([&] { kappa_char_formula(sys, 1, PolyQ::monomial(ctx.get(), 1)); }), Errc::NotADivisor);
  EXPECT_EQ(code([&] { is_gfree_direct(sys, 1, PolyQ::constant(ctx.get(), 2)); }), Errc::NotADivisor);
  EXPECT_EQ(code([] { snap_indicator(0.5); }), Errc::ConsistencyFailure);
  EXPECT_TRUE(snap_indicator(1.0 - 1e-9));
  EXPECT_FALSE(snap_indicator(-1e-9));
}

TEST(FreenessKnownValues, PrimitiveAndNormalCounts) {
  // F_9 over F_3: 4 primitive elements; normal elements number Phi(x^2 - 1) = 4
  const auto ctx = build_tower(3, 1, 2);
  const CharacterSystem sys(ctx);
  std::uint64_t prim = 0, normal = 0;
  for (Handle a = 1; a < ctx->size(); ++a) {
    prim += is_efree_direct(*ctx, a, 8);
    normal += is_gfree_direct_index(sys, a, sys.index_top());
  }
  EXPECT_EQ(prim, 4u);
  EXPECT_EQ(normal, 4u);
}
