#pragma once

// Ground-truth primality for machine-sized integers: a bit sieve over odd
// numbers and a deterministic Miller-Rabin for anything below 2^64.

#include <genproth/arith.hpp>

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

namespace genproth {

namespace detail {

inline std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((unsigned __int128)a * b % m);
}

inline std::uint64_t powmod64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod64(r, b, m);
    b = mulmod64(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace detail

/// Deterministic for all n < 2^64 (first twelve prime bases).
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t q : small) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : small) {
    std::uint64_t x = detail::powmod64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline bool is_prime_by_trial_division(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d <= n / d; d += 2)
    if (n % d == 0) return false;
  return true;
}

/// Default ceiling on sieve limits; the environment variable
/// GENPROTH_SIEVE_CAP overrides it.
inline std::uint64_t sieve_cap() {
  if (const char* env = std::getenv("GENPROTH_SIEVE_CAP")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DomainError(std::string("GENPROTH_SIEVE_CAP is not a number: ") + env);
    }
  }
  return std::uint64_t{1} << 32;
}

/// Eratosthenes table over the odd integers below `limit`.
class SieveOracle {
 public:
  explicit SieveOracle(std::uint64_t limit) : limit_(limit) {
    const std::uint64_t cap = sieve_cap();
    if (limit > cap)
      throw ResourceError("sieve limit " + std::to_string(limit) +
                          " exceeds cap " + std::to_string(cap));
    composite_.assign((limit / 2 + 64) / 64, 0);
    for (std::uint64_t i = 3; i * i < limit; i += 2) {
      if (marked(i)) continue;
      for (std::uint64_t j = i * i; j < limit; j += 2 * i) mark(j);
    }
    self_check();
  }

  std::uint64_t limit() const { return limit_; }

  bool is_prime(std::uint64_t n) const {
    if (n >= limit_) throw DomainError("query " + std::to_string(n) + " beyond sieve limit");
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    return !marked(n);
  }

  std::vector<std::uint64_t> primes() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 2; n < limit_; ++n)
      if (is_prime(n)) out.push_back(n);
    return out;
  }

 private:
  bool marked(std::uint64_t odd) const {
    const std::uint64_t i = odd / 2;
    return (composite_[i / 64] >> (i % 64)) & 1;
  }
  void mark(std::uint64_t odd) {
    const std::uint64_t i = odd / 2;
    composite_[i / 64] |= std::uint64_t{1} << (i % 64);
  }

  void self_check() const {
    if (limit_ < 3) return;
    std::mt19937_64 rng(limit_);
    std::uniform_int_distribution<std::uint64_t> pick(0, limit_ - 1);
    for (int t = 0; t < 1000; ++t) {
      const std::uint64_t n = pick(rng);
      const bool expected = n < (std::uint64_t{1} << 40) ? is_prime_by_trial_division(n)
                                                          : is_prime_u64(n);
      if (is_prime(n) != expected)
        throw std::logic_error("sieve disagrees with trial division at " + std::to_string(n));
    }
  }

  std::uint64_t limit_;
  std::vector<std::uint64_t> composite_;
};

inline SieveOracle build_sieve(std::uint64_t limit) { return SieveOracle(limit); }

}  // namespace genproth
