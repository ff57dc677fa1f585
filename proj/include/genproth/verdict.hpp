#pragma once

// Outcome types shared by every test, with the checkable evidence attached
// to Prime and Composite outcomes.

#include <genproth/arith.hpp>
#include <genproth/forms.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace genproth {

enum class Outcome { prime, composite, probable_prime, inconclusive };

enum class TestKind {
  pepin,
  proth,
  generalized_proth,
  pocklington,
  p_miller_rabin,
  complete_strong,
  certify_alg1,
  certify_alg2,
};

enum class WitnessReason {
  fermat_fail,      // a^(N-1) != 1
  chain_break,      // S != 1, S^p == 1, Phi_p(S) != 0
  euler_fail,       // a^((N-1)/2) != jacobi(a, N)
  factor_found,     // 1 < gcd(a, N) < N, or found while inverting
  pocklington_gcd,  // 1 < gcd(a^((N-1)/p) - 1, N) < N
};

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::prime: return "prime";
    case Outcome::composite: return "composite";
    case Outcome::probable_prime: return "probable-prime";
    case Outcome::inconclusive: return "inconclusive";
  }
  return "?";
}

inline std::string_view to_string(TestKind k) {
  switch (k) {
    case TestKind::pepin: return "pepin";
    case TestKind::proth: return "proth";
    case TestKind::generalized_proth: return "gproth";
    case TestKind::pocklington: return "pocklington";
    case TestKind::p_miller_rabin: return "pmr";
    case TestKind::complete_strong: return "complete";
    case TestKind::certify_alg1: return "alg1";
    case TestKind::certify_alg2: return "alg2";
  }
  return "?";
}

inline std::optional<TestKind> test_kind_from_string(std::string_view s) {
  for (auto k : {TestKind::pepin, TestKind::proth, TestKind::generalized_proth,
                 TestKind::pocklington, TestKind::p_miller_rabin, TestKind::complete_strong,
                 TestKind::certify_alg1, TestKind::certify_alg2})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::string_view to_string(WitnessReason r) {
  switch (r) {
    case WitnessReason::fermat_fail: return "fermat-fail";
    case WitnessReason::chain_break: return "chain-break";
    case WitnessReason::euler_fail: return "euler-fail";
    case WitnessReason::factor_found: return "factor-found";
    case WitnessReason::pocklington_gcd: return "pocklington-gcd";
  }
  return "?";
}

/// Evidence that N = K p^n + 1 is prime: Phi_p(a^(K p^(j-1))) == 0 mod N
/// together with p^(2j) > K p^n. Fields are raw so a tampered record can
/// be represented and rejected.
struct PrimalityCertificate {
  Natural K;
  std::uint64_t p = 0;
  std::uint64_t n = 0;
  Natural N;
  Natural base;
  std::uint64_t index = 0;  // j
  std::string algorithm;    // producing test, a TestKind label
  std::optional<Natural> s_prev;   // S_(j-1) = a^(K p^(j-1)) mod N
  std::optional<Natural> s_index;  // S_j, always 1 when valid

  bool operator==(const PrimalityCertificate&) const = default;
};

struct CompositenessWitness {
  WitnessReason reason = WitnessReason::fermat_fail;
  Natural base;
  std::uint64_t p = 0;   // chain prime for chain-break
  Natural exponent;      // chain-break: e with S = a^e; euler-fail: (N-1)/2
  Natural factor;        // factor-found / pocklington-gcd
  int jacobi = 0;        // euler-fail only
};

struct TestVerdict {
  Outcome outcome = Outcome::inconclusive;
  TestKind kind = TestKind::certify_alg2;
  Natural N;
  Natural base;
  std::optional<PrimalityCertificate> certificate;
  std::optional<CompositenessWitness> witness;
  std::string note;  // e.g. "p-strong", "degenerate base"

  bool is_prime() const { return outcome == Outcome::prime; }
  bool is_composite() const { return outcome == Outcome::composite; }
};

}  // namespace genproth
