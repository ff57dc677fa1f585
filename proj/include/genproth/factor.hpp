#pragma once

// Factorization of N - 1 for the complete strong test: trial division up to
// 10^6, then Brent's variant of Pollard rho with seeds c = 1, 2, 3, ...

#include <genproth/arith.hpp>
#include <genproth/oracle.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace genproth {

struct PrimePower {
  Natural prime;
  unsigned exponent = 0;
  bool operator==(const PrimePower&) const = default;
};

struct Factorization {
  std::vector<PrimePower> factors;   // ascending primes
  std::optional<Natural> cofactor;   // unfactored remainder when partial

  bool complete() const { return !cofactor.has_value(); }
};

inline constexpr std::uint64_t kTrialDivisionBound = 1'000'000;
inline constexpr std::uint64_t kDefaultRhoBudget = 1'000'000;

namespace detail {

inline bool is_probable_prime(const Natural& m) {
  if (m.fits_ulong_p()) return is_prime_u64(m.get_ui());
  return mpz_probab_prime_p(m.get_mpz_t(), 30) > 0;
}

/// One Brent rho attempt with x -> x^2 + c. Returns a proper divisor or
/// nothing; `budget` is decremented per iteration.
inline std::optional<Natural> brent_rho(const Natural& m, unsigned long c,
                                        std::uint64_t& budget) {
  constexpr std::uint64_t batch = 128;
  Natural y = 2, x, ys, q = 1, g = 1, t;
  std::uint64_t r = 1;
  auto f = [&](const Natural& v) {
    Natural out = v * v + c;
    mpz_mod(out.get_mpz_t(), out.get_mpz_t(), m.get_mpz_t());
    return out;
  };
  while (g == 1) {
    x = y;
    for (std::uint64_t i = 0; i < r; ++i) y = f(y);
    std::uint64_t k = 0;
    while (k < r && g == 1) {
      ys = y;
      const std::uint64_t lim = std::min(batch, r - k);
      for (std::uint64_t i = 0; i < lim; ++i) {
        y = f(y);
        t = x - y;
        q = abs(t) * q;
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), m.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), m.get_mpz_t());
      k += lim;
      if (budget < lim) return std::nullopt;
      budget -= lim;
    }
    r *= 2;
  }
  if (g == m) {
    // batch overshot; retrace one step at a time
    do {
      ys = f(ys);
      t = x - ys;
      g = gcd(abs(t), m);
      if (budget == 0) return std::nullopt;
      --budget;
    } while (g == 1);
  }
  if (g == m) return std::nullopt;
  return g;
}

inline void split(const Natural& m, std::uint64_t& budget,
                  std::map<Natural, unsigned>& found, std::vector<Natural>& stuck) {
  if (m == 1) return;
  if (is_probable_prime(m)) {
    ++found[m];
    return;
  }
  if (mpz_perfect_square_p(m.get_mpz_t())) {
    Natural root;
    mpz_sqrt(root.get_mpz_t(), m.get_mpz_t());
    split(root, budget, found, stuck);
    split(root, budget, found, stuck);
    return;
  }
  for (unsigned long c = 1; budget > 0; ++c) {
    if (auto d = brent_rho(m, c, budget)) {
      split(*d, budget, found, stuck);
      split(Natural(m / *d), budget, found, stuck);
      return;
    }
  }
  stuck.push_back(m);
}

}  // namespace detail

/// Complete factorization of m >= 2, or a partial one carrying the
/// unfactored cofactor when the rho budget (iterations) runs out.
inline Factorization factorize(const Natural& m, std::uint64_t budget = kDefaultRhoBudget) {
  if (m < 2) throw DomainError("factorize requires m >= 2");
  std::map<Natural, unsigned> found;
  Natural rest = m;
  if (rest.fits_ulong_p()) {
    std::uint64_t v = rest.get_ui();
    for (std::uint64_t d = 2; d <= kTrialDivisionBound && d <= v / d; d += (d == 2 ? 1 : 2)) {
      while (v % d == 0) {
        ++found[Natural(d)];
        v /= d;
      }
    }
    rest = Natural(v);
  } else {
    for (unsigned long d = 2; d <= kTrialDivisionBound; d += (d == 2 ? 1 : 2)) {
      while (mpz_divisible_ui_p(rest.get_mpz_t(), d)) {
        ++found[Natural(d)];
        mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), d);
      }
      if (rest == 1) break;
    }
  }
  std::vector<Natural> stuck;
  if (rest > 1) {
    // below bound^2 with no small factor left, rest is prime
    if (rest < Natural(kTrialDivisionBound) * kTrialDivisionBound)
      ++found[rest];
    else
      detail::split(rest, budget, found, stuck);
  }
  Factorization out;
  for (auto& [prime, e] : found) out.factors.push_back({prime, e});
  if (!stuck.empty()) {
    Natural co = 1;
    for (auto& s : stuck) co *= s;
    out.cofactor = co;
  }
  return out;
}

}  // namespace genproth
