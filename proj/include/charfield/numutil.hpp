#pragma once

// Integer-side arithmetic: primality, factorization with a persistent cache,
// and the arithmetic functions phi, mu and W (squarefree divisor count).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charfield/error.hpp"

namespace charfield::num {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 base, u64 e, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    e >>= 1;
  }
  return r;
}

/// splitmix64 step; used wherever a seed has to be expanded deterministically.
inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 sp : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % sp == 0) return n == sp;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Returns (prime, exponent) if n = prime^exponent with exponent >= 1, nullopt otherwise.
inline std::optional<std::pair<u64, int>> prime_power(u64 n) {
  if (n < 2) return std::nullopt;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      if (n != 1) return std::nullopt;
      return std::make_pair(p, e);
    }
  }
  return std::make_pair(n, 1);
}

struct IntFactorization {
  u64 n = 1;
  std::vector<std::pair<u64, int>> factors;  // ascending primes

  u64 reconstruct() const {
    u64 r = 1;
    for (auto [pr, e] : factors)
      for (int i = 0; i < e; ++i) r *= pr;
    return r;
  }

  std::vector<u64> primes() const {
    std::vector<u64> out;
    for (auto [pr, e] : factors) out.push_back(pr);
    return out;
  }

  bool operator==(const IntFactorization&) const = default;
};

inline std::string format_factorization(const IntFactorization& f) {
  std::ostringstream os;
  os << f.n << '=';
  for (std::size_t i = 0; i < f.factors.size(); ++i) {
    if (i) os << ',';
    os << f.factors[i].first << '^' << f.factors[i].second;
  }
  return os.str();
}

/// Parses one cache line "n=p1^e1,p2^e2". Lines that do not reconstitute n
/// from verified primes are rejected.
inline std::optional<IntFactorization> parse_factorization_line(const std::string& line) {
  auto eq = line.find('=');
  if (eq == std::string::npos || eq == 0) return std::nullopt;
  IntFactorization f;
  try {
    std::size_t used = 0;
    f.n = std::stoull(line.substr(0, eq), &used);
    if (used != eq) return std::nullopt;
    std::string rest = line.substr(eq + 1);
    if (!rest.empty()) {
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto caret = item.find('^');
        if (caret == std::string::npos) return std::nullopt;
        u64 pr = std::stoull(item.substr(0, caret), &used);
        if (used != caret) return std::nullopt;
        int e = std::stoi(item.substr(caret + 1), &used);
        if (used != item.size() - caret - 1 || e <= 0) return std::nullopt;
        f.factors.emplace_back(pr, e);
      }
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (f.n == 0) return std::nullopt;
  u128 prod = 1;
  u64 prev = 0;
  for (auto [pr, e] : f.factors) {
    if (pr <= prev || !is_prime(pr)) return std::nullopt;
    prev = pr;
    for (int i = 0; i < e; ++i) {
      prod *= pr;
      if (prod > f.n) return std::nullopt;
    }
  }
  if (prod != f.n) return std::nullopt;
  return f;
}

/// Append-only on-disk cache of integer factorizations.
///
/// One line per entry, "n=p1^e1,p2^e2,...". Corrupt lines are skipped with a
/// warning on stderr. Lookups take a shared lock; appends are serialized and
/// written with a single call so lines never interleave.
class FactorCache {
 public:
  static constexpr const char* kFileName = "int_factor_cache.txt";

  explicit FactorCache(std::filesystem::path dir) : dir_(std::move(dir)) { load(); }

  /// Cache rooted at $CHARFIELD_CACHE, or nullopt when the variable is unset.
  static std::optional<std::filesystem::path> env_dir() {
    const char* v = std::getenv("CHARFIELD_CACHE");
    if (!v || !*v) return std::nullopt;
    return std::filesystem::path(v);
  }

  std::optional<IntFactorization> lookup(u64 n) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(n);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(const IntFactorization& f) {
    std::unique_lock lock(mu_);
    if (entries_.count(f.n)) return;
    entries_[f.n] = f;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    std::string line = format_factorization(f) + "\n";
    std::FILE* fp = std::fopen(path().c_str(), "a");
    if (!fp) throw Error(Errc::IoError, "cannot append to " + path().string());
    std::fwrite(line.data(), 1, line.size(), fp);
    std::fclose(fp);
  }

  std::filesystem::path path() const { return dir_ / kFileName; }
  std::size_t size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
  }
  std::size_t skipped_lines() const { return skipped_; }

 private:
  void load() {
    std::ifstream in(path());
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto f = parse_factorization_line(line);
      if (!f) {
        ++skipped_;
        std::cerr << "warning: skipping corrupt factor cache line " << lineno << " in "
                  << path().string() << "\n";
        continue;
      }
      entries_.emplace(f->n, *f);
    }
  }

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  std::map<u64, IntFactorization> entries_;
  std::size_t skipped_ = 0;
};

/// Process-wide cache used by factor_int when no explicit cache is given.
inline FactorCache*& global_factor_cache() {
  static FactorCache* cache = nullptr;
  return cache;
}

struct FactorOptions {
  u64 seed = 0;
  u64 rho_iterations = u64{1} << 24;  // total budget across restarts
  FactorCache* cache = nullptr;       // nullptr selects global_factor_cache()
};

namespace detail {

inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    constexpr std::uint32_t kLimit = 1000000;
    std::vector<bool> composite(kLimit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= kLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (u64 j = u64{i} * i; j <= kLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// Brent's variant of Pollard rho. Returns a nontrivial factor or 0 when the
// iteration budget runs out.
inline u64 pollard_brent(u64 n, u64& rng, u64& budget) {
  if (n % 2 == 0) return 2;
  while (budget > 0) {
    rng = splitmix64(rng);
    u64 y = rng % n;
    rng = splitmix64(rng);
    u64 c = rng % (n - 1) + 1;
    const u64 m = 128;
    u64 g = 1, r = 1, q = 1, x = 0, ys = 0;
    auto f = [&](u64 v) { return static_cast<u64>((static_cast<u128>(mulmod(v, v, n)) + c) % n); };
    while (g == 1 && budget > 0) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      while (k < r && g == 1) {
        ys = y;
        u64 lim = std::min(m, r - k);
        for (u64 i = 0; i < lim; ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        budget = budget > lim ? budget - lim : 0;
        g = std::gcd(q, n);
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return 0;
}

inline void factor_rec(u64 n, std::map<u64, int>& out, u64& rng, u64& budget) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  u64 d = pollard_brent(n, rng, budget);
  if (d == 0) throw Error(Errc::FactorizationIncomplete, "Pollard rho budget exhausted on " + std::to_string(n));
  factor_rec(d, out, rng, budget);
  factor_rec(n / d, out, rng, budget);
}

}  // namespace detail

/// Complete factorization: trial division to 10^6, then seeded Pollard rho.
inline IntFactorization factor_int(u64 n, const FactorOptions& opts = {}) {
  if (n == 0) throw Error(Errc::InvalidArgument, "factor_int requires n >= 1");
  FactorCache* cache = opts.cache ? opts.cache : global_factor_cache();
  if (cache) {
    if (auto hit = cache->lookup(n)) return *hit;
  }
  std::map<u64, int> acc;
  u64 rest = n;
  for (std::uint32_t pr : detail::small_primes()) {
    if (u64{pr} * pr > rest) break;
    while (rest % pr == 0) {
      rest /= pr;
      ++acc[pr];
    }
  }
  if (rest > 1) {
    u64 rng = splitmix64(opts.seed ^ n);
    u64 budget = opts.rho_iterations;
    detail::factor_rec(rest, acc, rng, budget);
  }
  IntFactorization f;
  f.n = n;
  f.factors.assign(acc.begin(), acc.end());
  if (cache) cache->store(f);
  return f;
}

inline u64 euler_phi(const IntFactorization& f) {
  u64 r = 1;
  for (auto [pr, e] : f.factors) {
    r *= pr - 1;
    for (int i = 1; i < e; ++i) r *= pr;
  }
  return r;
}

/// W(n): number of squarefree positive divisors.
inline u64 squarefree_divisor_count(const IntFactorization& f) { return u64{1} << f.factors.size(); }

/// Moebius function of a divisor d of f.n.
inline int mobius_of_divisor(const IntFactorization& f, u64 d) {
  if (d == 0 || f.n % d != 0) throw Error(Errc::NotADivisor, std::to_string(d) + " does not divide " + std::to_string(f.n));
  int s = 0;
  for (auto [pr, e] : f.factors) {
    if (d % pr) continue;
    d /= pr;
    if (d % pr == 0) return 0;
    ++s;
  }
  return (s % 2) ? -1 : 1;
}

/// phi(d) for a divisor d of f.n.
inline u64 euler_phi_of_divisor(const IntFactorization& f, u64 d) {
  if (d == 0 || f.n % d != 0) throw Error(Errc::NotADivisor, std::to_string(d) + " does not divide " + std::to_string(f.n));
  u64 r = d;
  for (auto [pr, e] : f.factors)
    if (d % pr == 0) r = r / pr * (pr - 1);
  return r;
}

/// All positive divisors, ascending.
inline std::vector<u64> divisors(const IntFactorization& f) {
  std::vector<u64> out{1};
  for (auto [pr, e] : f.factors) {
    std::size_t cur = out.size();
    u64 pw = 1;
    for (int i = 1; i <= e; ++i) {
      pw *= pr;
      for (std::size_t k = 0; k < cur; ++k) out.push_back(out[k] * pw);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<u64> squarefree_divisors(const IntFactorization& f) {
  std::vector<u64> out{1};
  for (auto [pr, e] : f.factors) {
    std::size_t cur = out.size();
    for (std::size_t k = 0; k < cur; ++k) out.push_back(out[k] * pr);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Multiplicative order of a modulo n (gcd(a, n) must be 1).
inline u64 multiplicative_order_mod(u64 a, u64 n) {
  if (n == 1) return 1;
  if (std::gcd(a % n, n) != 1) throw Error(Errc::InvalidArgument, "element not invertible");
  u64 ord = 1;
  u64 x = a % n;
  while (x != 1) {
    x = mulmod(x, a, n);
    ++ord;
  }
  return ord;
}

/// True when q generates (Z/mZ)^* (m prime).
inline bool is_primitive_mod(u64 q, u64 m) { return is_prime(m) && q % m != 0 && multiplicative_order_mod(q, m) == m - 1; }

inline std::vector<u64> prime_powers_up_to(u64 limit) {
  std::vector<u64> out;
  for (u64 v = 2; v <= limit; ++v)
    if (prime_power(v)) out.push_back(v);
  return out;
}

}  // namespace charfield::num
