#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "charfield/numutil.hpp"
#include "oracles.hpp"

using namespace charfield;
using namespace charfield::num;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("charfield_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(NumUtil, PrimalityMatchesTrialDivision) {
  for (u64 n = 0; n < 5000; ++n) EXPECT_EQ(is_prime(n), oracle::is_prime(n)) << n;
  EXPECT_TRUE(is_prime(4294967291ULL));
  EXPECT_TRUE(is_prime(18446744073709551557ULL));
  EXPECT_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST(NumUtil, PrimePowerDetection) {
  EXPECT_EQ(prime_power(2), std::make_pair(u64{2}, 1));
  EXPECT_EQ(prime_power(64), std::make_pair(u64{2}, 6));
  EXPECT_EQ(prime_power(49), std::make_pair(u64{7}, 2));
  EXPECT_FALSE(prime_power(1));
  EXPECT_FALSE(prime_power(12));
  EXPECT_FALSE(prime_power(36));
  for (u64 n = 2; n < 2000; ++n) {
    auto pp = prime_power(n);
    bool expect = false;
    for (u64 p = 2; p <= n; ++p)
      if (oracle::is_prime(p)) {
        u64 v = p;
        while (v < n) v *= p;
        if (v == n) expect = true;
      }
    EXPECT_EQ(pp.has_value(), expect) << n;
    if (pp) { EXPECT_EQ(oracle::ipow(pp->first, pp->second), n); }
  }
}

TEST(NumUtil, FactorizationReconstructsWithPrimeFactors) {
  std::mt19937_64 rng(7);
  std::vector<u64> ns{1, 2, 4095, 65535, 1ULL << 40, 999999000001ULL, 4294967297ULL, 600851475143ULL};
  for (int i = 0; i < 200; ++i) ns.push_back(rng() >> (rng() % 40));
  ns.push_back(4294967291ULL * 4294967279ULL);  // product of two 32-bit primes
  for (u64 n : ns) {
    if (n == 0) continue;
    const auto f = factor_int(n);
    EXPECT_EQ(f.n, n);
    EXPECT_EQ(f.reconstruct(), n);
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
      EXPECT_TRUE(is_prime(f.factors[i].first));
      if (i) { EXPECT_LT(f.factors[i - 1].first, f.factors[i].first); }
    }
  }
}

TEST(NumUtil, FactorZeroIsRejected) { EXPECT_THROW(factor_int(0), Error); }

TEST(NumUtil, ArithmeticFunctionsMatchOracles) {
  for (u64 n = 1; n < 600; ++n) {
    const auto f = factor_int(n);
    EXPECT_EQ(euler_phi(f), oracle::phi(n)) << n;
    const auto divs = divisors(f);
    EXPECT_EQ(divs, oracle::divisors(n));
    std::vector<u64> sq;
    for (u64 d : oracle::divisors(n))
      if (oracle::mobius(d) != 0) sq.push_back(d);
    EXPECT_EQ(squarefree_divisors(f), sq);
    EXPECT_EQ(squarefree_divisor_count(f), sq.size());
    for (u64 d : divs) {
      EXPECT_EQ(mobius_of_divisor(f, d), oracle::mobius(d));
      EXPECT_EQ(euler_phi_of_divisor(f, d), oracle::phi(d));
    }
  }
}

TEST(NumUtil, MultiplicativeOrderAndPrimitiveResidues) {
  EXPECT_EQ(multiplicative_order_mod(2, 7), 3u);
  EXPECT_EQ(multiplicative_order_mod(3, 7), 6u);
  EXPECT_THROW(multiplicative_order_mod(6, 9), Error);
  EXPECT_TRUE(is_primitive_mod(2, 3));
  EXPECT_TRUE(is_primitive_mod(5, 3));
  EXPECT_FALSE(is_primitive_mod(4, 3));
  EXPECT_TRUE(is_primitive_mod(2, 5));
  EXPECT_FALSE(is_primitive_mod(4, 5));
  EXPECT_FALSE(is_primitive_mod(2, 4));   // m not prime
  EXPECT_FALSE(is_primitive_mod(9, 3));   // q divisible by m
}

TEST(NumUtil, PrimePowersUpTo) {
  const std::vector<u64> expect{2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32};
  EXPECT_EQ(prime_powers_up_to(32), expect);
  EXPECT_TRUE(prime_powers_up_to(1).empty());
}

TEST(NumUtil, SplitmixIsDeterministic) {
  EXPECT_EQ(splitmix64(0), splitmix64(0));
  EXPECT_NE(splitmix64(0), splitmix64(1));
}

TEST(FactorCacheTest, StoresAndReloads) {
  const auto dir = fresh_dir("cache");
  {
    FactorCache c(dir);
    EXPECT_EQ(c.size(), 0u);
    FactorOptions o;
    o.cache = &c;
    const auto f = factor_int(4095, o);
    EXPECT_EQ(c.size(), 1u);
    EXPECT_EQ(c.lookup(4095), f);
  }
  FactorCache again(dir);
  ASSERT_TRUE(again.lookup(4095));
  EXPECT_EQ(again.lookup(4095)->reconstruct(), 4095u);
  EXPECT_EQ(again.skipped_lines(), 0u);
  std::filesystem::remove_all(dir);
}

TEST(FactorCacheTest, CorruptLinesAreSkipped) {
  const auto dir = fresh_dir("corrupt");
  {
    std::ofstream out(dir / FactorCache::kFileName);
    out << "15=3^1,5^1\n";
    out << "garbage\n";
    out << "16=2^3\n";     // does not reconstitute
    out << "21=3^1,6^1\n";  // 6 is not prime
    out << "35=5^1,7^1\n";
  }
  FactorCache c(dir);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.skipped_lines(), 3u);
  EXPECT_TRUE(c.lookup(15));
  EXPECT_TRUE(c.lookup(35));
  EXPECT_FALSE(c.lookup(16));
  std::filesystem::remove_all(dir);
}

TEST(FactorCacheTest, ParseRejectsNonPrimeFactors) {
  EXPECT_FALSE(parse_factorization_line("36=4^1,9^1"));
  EXPECT_FALSE(parse_factorization_line("=2^1"));
  EXPECT_TRUE(parse_factorization_line("1="));
  EXPECT_TRUE(parse_factorization_line("12=2^2,3^1"));
}
