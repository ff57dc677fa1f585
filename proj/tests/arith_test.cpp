#include <genproth/arith.hpp>

#include <gtest/gtest.h>

#include <random>

#include "brute_force.hpp"

using namespace genproth;

TEST(ModPow, SmallCases) {
  EXPECT_EQ(mod_pow(2, 6, 19), 7);
  EXPECT_EQ(mod_pow(3, 8, 17), 16);
  EXPECT_EQ(mod_pow(123, 0, 7), 1);
  EXPECT_EQ(mod_pow(0, 0, 2), 1);
}

TEST(ModPow, RejectsTinyModulus) {
  EXPECT_THROW(mod_pow(2, 3, 1), DomainError);
  EXPECT_THROW(mod_pow(2, 3, 0), DomainError);
}

TEST(ModPow, CountsBinaryProducts) {
  OpCounter c;
  mod_pow(3, 127, 1000003, c);
  EXPECT_EQ(c.squarings, 6u);
  EXPECT_EQ(c.multiplications, 6u);
  OpCounter d;
  mod_pow(3, 1, 1000003, d);
  EXPECT_EQ(d.products(), 0u);
}

TEST(ModPow, MatchesRepeatedMultiplication) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 2000; ++t) {
    const std::uint64_t m = 2 + rng() % 100000;
    const std::uint64_t b = rng() % 1000000;
    const std::uint64_t e = rng() % 300;
    EXPECT_EQ(mod_pow(b, e, m), brute::pow_by_repetition(b, e, m)) << b << "^" << e << " mod " << m;
  }
}

TEST(ModInverse, Examples) {
  EXPECT_EQ(std::get<Natural>(mod_inverse(7, 19)), 11);
  EXPECT_EQ(std::get<Natural>(mod_inverse(1, 97)), 1);
  auto bad = mod_inverse(6, 21);
  ASSERT_TRUE(std::holds_alternative<NonInvertible>(bad));
  EXPECT_EQ(std::get<NonInvertible>(bad).gcd, 3);
}

TEST(ModInverse, Property) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const std::uint64_t m = 2 + rng() % 1000000;
    const std::uint64_t x = rng() % (3 * m);
    auto r = mod_inverse(x, m);
    if (auto* y = std::get_if<Natural>(&r)) {
      EXPECT_EQ(brute::mulmod(x % m, y->get_ui(), m), 1 % m);
    } else {
      const auto g = std::get<NonInvertible>(r).gcd.get_ui();
      EXPECT_EQ(g, brute::gcd(x % m, m));
      EXPECT_GT(g, 1u);
    }
  }
}

TEST(Schedule, MersenneExponent127) {
  const auto s = build_schedule(127);
  EXPECT_EQ(s.predicted_squarings, 7u);
  EXPECT_EQ(s.predicted_multiplications, 0u);
  EXPECT_EQ(s.predicted_inversions, 1u);
  EXPECT_EQ(s.predicted_products(), 8u);
  const auto b = binary_schedule(127);
  EXPECT_EQ(b.predicted_products(), 12u);
}

TEST(Schedule, SquareOnly) {
  const auto s = build_schedule(2);
  ASSERT_EQ(s.steps.size(), 1u);
  EXPECT_EQ(s.steps[0], StepKind::square);
  EXPECT_EQ(s.predicted_squarings, 1u);
  EXPECT_EQ(s.predicted_multiplications, 0u);
  EXPECT_EQ(s.predicted_inversions, 0u);
}

TEST(Schedule, FermatExponent257) {
  const auto s = build_schedule(257);
  EXPECT_EQ(s.predicted_squarings, 8u);
  EXPECT_EQ(s.predicted_multiplications, 1u);
  EXPECT_EQ(s.predicted_inversions, 0u);
  EXPECT_EQ(replay_exponent(s), 257u);
}

TEST(Schedule, RejectsSmallExponent) {
  EXPECT_THROW(build_schedule(1), DomainError);
  EXPECT_THROW(build_schedule(0), DomainError);
  EXPECT_THROW(binary_schedule(1), DomainError);
}

TEST(Schedule, MersenneFamilyCounts) {
  for (std::uint64_t s = 2; s < 63; ++s) {
    const std::uint64_t p = (std::uint64_t{1} << s) - 1;
    const auto naf = build_schedule(p);
    EXPECT_EQ(naf.predicted_products(), s + 1) << p;
    EXPECT_EQ(binary_schedule(p).predicted_products(), 2 * (s - 1)) << p;
    if (s >= 3) EXPECT_LE(s + 1, 2 * (s - 1));
    const auto fermat = build_schedule(p + 2);
    EXPECT_EQ(fermat.predicted_squarings, s);
    EXPECT_EQ(fermat.predicted_multiplications + fermat.predicted_inversions, 1u);
  }
}

TEST(Schedule, SymbolicReplayAndCounts) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20000; ++t) {
    const std::uint64_t p = t < 5000 ? std::uint64_t(t + 2) : 2 + rng() % (std::uint64_t{1} << 62);
    for (const auto& s : {build_schedule(p), binary_schedule(p)}) {
      ASSERT_EQ(replay_exponent(s), p);
      std::uint64_t sq = 0, mul = 0, inv = 0;
      for (auto k : s.steps) {
        sq += k == StepKind::square;
        mul += k == StepKind::multiply;
        inv += k == StepKind::multiply_inverse;
      }
      EXPECT_EQ(sq, s.predicted_squarings);
      EXPECT_EQ(mul, s.predicted_multiplications);
      EXPECT_EQ(inv, s.predicted_inversions);
    }
    const auto naf = build_schedule(p);
    EXPECT_LE(naf.predicted_multiplications + naf.predicted_inversions,
              binary_schedule(p).predicted_multiplications)
        << p;
  }
}

TEST(Schedule, SelectionHonoursCostModel) {
  const CostModel model;
  for (std::uint64_t p : {3, 7, 31, 127, 257}) {
    const auto chosen = select_schedule(p, model);
    EXPECT_LE(chosen.predicted_cost(model), binary_schedule(p).predicted_cost(model)) << p;
  }
  EXPECT_TRUE(select_schedule(127, model).uses_inverse());
  EXPECT_FALSE(select_schedule(31, model).uses_inverse());
  EXPECT_TRUE(select_schedule(31, CostModel{2.0}).uses_inverse());
  EXPECT_FALSE(select_schedule(31, CostModel{2.5}).uses_inverse());
}

TEST(PowP, Examples) {
  OpCounter c;
  EXPECT_EQ(std::get<Natural>(pow_p_scheduled(5, build_schedule(7), 11, c)), 3);
  EXPECT_EQ(std::get<Natural>(pow_p_scheduled(1, build_schedule(127), 1000003, c)), 1);
  for (std::uint64_t m : {5, 7, 1000003, 998244353}) {
    EXPECT_EQ(std::get<Natural>(pow_p_scheduled(3, build_schedule(127), m, c)),
              mod_pow(3, 127, m));
  }
}

TEST(PowP, CountsMatchSchedule) {
  OpCounter c;
  pow_p_scheduled(3, build_schedule(127), 1000003, c);
  EXPECT_EQ(c.squarings, 7u);
  EXPECT_EQ(c.multiplications, 1u);
  EXPECT_EQ(c.inversions, 1u);
}

TEST(PowP, FactorFoundOnSharedFactor) {
  OpCounter c;
  auto r = pow_p_scheduled(6, build_schedule(127), 21, c);
  ASSERT_TRUE(std::holds_alternative<FactorFound>(r));
  EXPECT_EQ(std::get<FactorFound>(r).factor, 3);
  // binary schedule needs no inverse, so no factor is reported
  auto b = pow_p_scheduled(6, binary_schedule(127), 21, c);
  EXPECT_EQ(std::get<Natural>(b), mod_pow(6, 127, 21));
}

TEST(PowP, AgreesWithModPowRandomized) {
  std::mt19937_64 rng(5);
  int compared = 0;
  for (int t = 0; t < 12000; ++t) {
    const std::uint64_t p = 2 + rng() % 600;
    const std::uint64_t m = 2 + rng() % 2000000;
    const std::uint64_t x = rng() % 5000000;
    OpCounter c;
    auto r = pow_p_scheduled(x, build_schedule(p), m, c);
    if (auto* v = std::get_if<Natural>(&r)) {
      ASSERT_EQ(*v, mod_pow(x, p, m)) << x << "^" << p << " mod " << m;
      ++compared;
    } else {
      EXPECT_GT(brute::gcd(x % m, m), 1u);
    }
  }
  EXPECT_GE(compared, 7000);
}

TEST(PhiP, Examples) {
  EXPECT_EQ(phi_p_eval(7, 3, 19), 0);
  for (std::uint64_t p : {2, 3, 5, 127}) EXPECT_EQ(phi_p_eval(1, p, 1000003), p % 1000003);
  EXPECT_EQ(phi_p_eval(1, 7, 5), 2);
  for (std::uint64_t x : {0, 5, 18, 1000})
    EXPECT_EQ(phi_p_eval(x, 2, 19), (x + 1) % 19);
}

TEST(PhiP, RejectsBadArguments) {
  EXPECT_THROW(phi_p_eval(3, 1, 19), DomainError);
  EXPECT_THROW(phi_p_eval(3, 5, 1), DomainError);
}

TEST(PhiP, MatchesSumLoop) {
  std::mt19937_64 rng(9);
  const std::vector<std::uint64_t> primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
                                             43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
  for (int t = 0; t < 20000; ++t) {
    const std::uint64_t p = primes[rng() % primes.size()];
    const std::uint64_t x = rng() % 1000;
    const std::uint64_t m = 2 + rng() % 999998;
    ASSERT_EQ(phi_p_eval(x, p, m), brute::phi_sum(x, p, m)) << x << " " << p << " " << m;
  }
}

TEST(PhiP, CyclotomicFactorizationIdentity) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10000; ++t) {
    const std::uint64_t p = 2 + rng() % 200;
    const std::uint64_t x = rng() % 1000000;
    const std::uint64_t m = 2 + rng() % 999998;
    const Natural lhs = (Natural(x) - 1) * phi_p_eval(x, p, m);
    const Natural rhs = mod_pow(x, p, m) - 1;
    Natural diff = lhs - rhs;
    EXPECT_TRUE(mpz_divisible_ui_p(diff.get_mpz_t(), m)) << x << " " << p << " " << m;
  }
}

TEST(PhiP, LogarithmicProductCount) {
  for (std::uint64_t p : {2, 3, 5, 7, 13, 127, 257, 65537, 1000003}) {
    OpCounter c;
    phi_p_eval(12345, p, 998244353, c);
    const std::uint64_t log2p = 63 - __builtin_clzll(p);
    EXPECT_LE(c.products(), 2 * log2p + std::uint64_t(__builtin_popcountll(p))) << p;
  }
}

TEST(ParseNatural, StrictDecimal) {
  EXPECT_EQ(parse_natural("12345678901234567890123"), Natural("12345678901234567890123"));
  EXPECT_THROW(parse_natural(""), std::invalid_argument);
  EXPECT_THROW(parse_natural("-3"), std::invalid_argument);
  EXPECT_THROW(parse_natural(" 3"), std::invalid_argument);
  EXPECT_THROW(parse_natural("0x10"), std::invalid_argument);
}
