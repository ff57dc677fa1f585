#pragma once

// Primality tests for N = K p^n + 1: the classical criteria, the
// cyclotomic generalization of Proth's theorem, the p-Miller-Rabin test
// and the two certifiers built on the chain S_i = S_(i-1)^p.

#include <genproth/arith.hpp>
#include <genproth/factor.hpp>
#include <genproth/forms.hpp>
#include <genproth/verdict.hpp>

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace genproth {

enum class ScheduleMode { binary, scheduled };

/// How p-th powers along the chain are computed.
struct ChainOptions {
  ScheduleMode mode = ScheduleMode::binary;
  CostModel cost{};
};

inline int jacobi(const Natural& a, const Natural& N) {
  if (N < 3 || mpz_even_p(N.get_mpz_t())) throw DomainError("jacobi requires odd N >= 3");
  Natural x;
  mpz_mod(x.get_mpz_t(), a.get_mpz_t(), N.get_mpz_t());
  Natural m = N;
  int sign = 1;
  while (x != 0) {
    const auto twos = mpz_scan1(x.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), twos);
    const unsigned long m8 = mpz_fdiv_ui(m.get_mpz_t(), 8);
    if ((twos & 1) && (m8 == 3 || m8 == 5)) sign = -sign;
    // reciprocity: flip when both are 3 mod 4
    if (mpz_fdiv_ui(x.get_mpz_t(), 4) == 3 && m8 % 4 == 3) sign = -sign;
    std::swap(x, m);
    mpz_mod(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  }
  return m == 1 ? sign : 0;
}

namespace detail {

/// S -> S^p mod N along a chain, binary or NAF-scheduled.
class PowerStepper {
 public:
  PowerStepper(std::uint64_t p, const Natural& modulus, OpCounter& counter,
               const ChainOptions& options)
      : schedule_(options.mode == ScheduleMode::scheduled ? select_schedule(p, options.cost)
                                                          : binary_schedule(p)),
        modulus_(modulus),
        counter_(counter) {}

  PowResult operator()(const Natural& x) const {
    return pow_p_scheduled(x, schedule_, modulus_, counter_);
  }

 private:
  PowerSchedule schedule_;
  const Natural& modulus_;
  OpCounter& counter_;
};

inline TestVerdict make_verdict(Outcome o, TestKind kind, const Natural& N, const Natural& a) {
  TestVerdict v;
  v.outcome = o;
  v.kind = kind;
  v.N = N;
  v.base = a;
  return v;
}

inline TestVerdict composite(TestKind kind, const Natural& N, const Natural& a,
                             CompositenessWitness w) {
  auto v = make_verdict(Outcome::composite, kind, N, a);
  w.base = a;
  v.witness = std::move(w);
  return v;
}

inline TestVerdict factor_found(TestKind kind, const Natural& N, const Natural& a,
                                const Natural& d, WitnessReason reason = WitnessReason::factor_found) {
  CompositenessWitness w;
  w.reason = reason;
  w.factor = d;
  return composite(kind, N, a, std::move(w));
}

/// gcd screen shared by the tests. a == 0 mod N gives no information, so
/// it is reported as inconclusive rather than as a factor.
inline std::optional<TestVerdict> screen_base(TestKind kind, const Natural& N, const Natural& a) {
  Natural r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), N.get_mpz_t());
  if (r == 0) {
    auto v = make_verdict(Outcome::inconclusive, kind, N, a);
    v.note = "degenerate base (a = 0 mod N)";
    return v;
  }
  const Natural g = gcd(r, N);
  if (g != 1) return factor_found(kind, N, a, g);
  return std::nullopt;
}

inline PrimalityCertificate make_certificate(const ProthForm& form, const Natural& a,
                                             std::uint64_t j, TestKind kind,
                                             const Natural& s_prev) {
  PrimalityCertificate c;
  c.K = form.K();
  c.p = form.p();
  c.n = form.n();
  c.N = form.N();
  mpz_mod(c.base.get_mpz_t(), a.get_mpz_t(), c.N.get_mpz_t());
  c.index = j;
  c.algorithm = std::string(to_string(kind));
  c.s_prev = s_prev;
  c.s_index = Natural(1);
  return c;
}

inline CompositenessWitness chain_break(std::uint64_t p, const Natural& K, std::uint64_t i) {
  CompositenessWitness w;
  w.reason = WitnessReason::chain_break;
  w.p = p;
  w.exponent = K * pow_ui(p, i - 1);
  return w;
}

inline CompositenessWitness fermat_fail() {
  CompositenessWitness w;
  w.reason = WitnessReason::fermat_fail;
  return w;
}

/// Result of walking S_start, S_start+1, ... up to S_last until S_i == 1.
struct ChainWalk {
  enum class End { hit_one, exhausted, factor } end = End::exhausted;
  std::uint64_t index = 0;  // first i with S_i == 1
  Natural previous;         // S_(i-1)
  Natural factor;
};

inline ChainWalk walk_chain(Natural s, std::uint64_t start, std::uint64_t last,
                            const PowerStepper& step) {
  ChainWalk w;
  for (std::uint64_t i = start + 1; i <= last; ++i) {
    auto next = step(s);
    if (auto* f = std::get_if<FactorFound>(&next)) {
      w.end = ChainWalk::End::factor;
      w.factor = f->factor;
      return w;
    }
    Natural& value = std::get<Natural>(next);
    if (value == 1) {
      w.end = ChainWalk::End::hit_one;
      w.index = i;
      w.previous = std::move(s);
      return w;
    }
    s = std::move(value);
  }
  return w;
}

inline void require_generalized(const ProthForm& form, const char* who) {
  if (!form.generalized())
    throw DomainError(std::string(who) + " requires K < p^n, got " + form.to_string());
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultPepinCap = 14;

/// Pepin's test on F_m = 2^(2^m) + 1 with base 3.
inline TestVerdict pepin(std::uint64_t m, OpCounter& counter,
                         std::uint64_t cap = kDefaultPepinCap) {
  if (m < 1) throw DomainError("pepin requires m >= 1");
  if (m > cap)
    throw ResourceError("F_" + std::to_string(m) + " exceeds the Pepin size cap F_" +
                        std::to_string(cap));
  const ProthForm form = make_form(Natural(1), 2, std::uint64_t{1} << m);
  const Natural& N = form.N();
  const Natural a = 3;
  const Natural half = form.N_minus_1() / 2;
  const Natural y = mod_pow(a, half, N, counter);
  if (y == N - 1) {
    auto v = detail::make_verdict(Outcome::prime, TestKind::pepin, N, a);
    v.certificate = detail::make_certificate(form, a, form.n(), TestKind::pepin, y);
    return v;
  }
  const detail::CountingRing ring(N, counter);
  if (y != 1 && ring.square(y) == 1) {
    CompositenessWitness w = detail::chain_break(2, form.K(), form.n());
    return detail::composite(TestKind::pepin, N, a, std::move(w));
  }
  if (y == 1) {
    CompositenessWitness w;
    w.reason = WitnessReason::euler_fail;
    w.exponent = half;
    w.jacobi = jacobi(a, N);
    return detail::composite(TestKind::pepin, N, a, std::move(w));
  }
  return detail::composite(TestKind::pepin, N, a, detail::fermat_fail());
}

inline TestVerdict pepin(std::uint64_t m) {
  OpCounter scratch;
  return pepin(m, scratch);
}

/// Proth's criterion. With jacobi(a, N) = -1 the verdict is decisive;
/// otherwise a failed congruence is inconclusive.
inline TestVerdict proth_classic(const ProthForm& form, const Natural& a, OpCounter& counter) {
  if (!form.form_class().proth_classic)
    throw DomainError("proth test requires p = 2, K odd, K < 2^n; got " + form.to_string());
  const Natural& N = form.N();
  if (auto early = detail::screen_base(TestKind::proth, N, a)) return *early;
  const Natural half = form.N_minus_1() / 2;
  const Natural y = mod_pow(a, half, N, counter);
  if (y == N - 1) {
    auto v = detail::make_verdict(Outcome::prime, TestKind::proth, N, a);
    v.certificate = detail::make_certificate(form, a, form.n(), TestKind::proth, y);
    return v;
  }
  const int symbol = jacobi(a, N);
  if (symbol == -1) {
    CompositenessWitness w;
    w.reason = WitnessReason::euler_fail;
    w.exponent = half;
    w.jacobi = symbol;
    return detail::composite(TestKind::proth, N, a, std::move(w));
  }
  auto v = detail::make_verdict(Outcome::inconclusive, TestKind::proth, N, a);
  v.note = "congruence failed with jacobi(a, N) = " + std::to_string(symbol);
  return v;
}

/// Phi_p(a^((N-1)/p)) == 0 mod N proves N prime and a a p-th power
/// non-residue. Failure decides nothing.
inline TestVerdict generalized_proth(const ProthForm& form, const Natural& a, OpCounter& counter) {
  detail::require_generalized(form, "generalized Proth test");
  const Natural& N = form.N();
  if (auto early = detail::screen_base(TestKind::generalized_proth, N, a)) return *early;
  const Natural y = mod_pow(a, form.N_minus_1() / form.p(), N, counter);
  if (phi_p_eval(y, form.p(), N, counter) == 0) {
    auto v = detail::make_verdict(Outcome::prime, TestKind::generalized_proth, N, a);
    v.certificate =
        detail::make_certificate(form, a, form.n(), TestKind::generalized_proth, y);
    v.note = "base is a p-th power non-residue";
    return v;
  }
  auto v = detail::make_verdict(Outcome::inconclusive, TestKind::generalized_proth, N, a);
  v.note = "Phi_p(a^((N-1)/p)) != 0";
  return v;
}

/// Pocklington: a^(N-1) == 1 and gcd(a^((N-1)/p) - 1, N) == 1. The two
/// powers are computed independently, as the criterion is usually applied.
inline TestVerdict pocklington(const ProthForm& form, const Natural& a, OpCounter& counter) {
  detail::require_generalized(form, "Pocklington test");
  const Natural& N = form.N();
  if (auto early = detail::screen_base(TestKind::pocklington, N, a)) return *early;
  if (mod_pow(a, form.N_minus_1(), N, counter) != 1)
    return detail::composite(TestKind::pocklington, N, a, detail::fermat_fail());
  const Natural y = mod_pow(a, form.N_minus_1() / form.p(), N, counter);
  const Natural g = gcd(y - 1, N);
  if (g == 1) {
    auto v = detail::make_verdict(Outcome::prime, TestKind::pocklington, N, a);
    v.certificate = detail::make_certificate(form, a, form.n(), TestKind::pocklington, y);
    return v;
  }
  if (g == N) {
    auto v = detail::make_verdict(Outcome::inconclusive, TestKind::pocklington, N, a);
    v.note = "a^((N-1)/p) == 1 mod N";
    return v;
  }
  return detail::factor_found(TestKind::pocklington, N, a, g, WitnessReason::pocklington_gcd);
}

/// p-strong probable prime test on an arbitrary N with p | N - 1. Writes
/// N - 1 = K p^n with gcd(K, p) = 1 and checks a^K == 1 or
/// Phi_p(a^(K p^j)) == 0 for some 0 <= j < n.
inline TestVerdict p_miller_rabin(const Natural& N, std::uint64_t p, const Natural& a,
                                  OpCounter& counter, const ChainOptions& options = {}) {
  if (N < 3) throw DomainError("p-Miller-Rabin requires N >= 3");
  if (!is_prime_u64(p)) throw DomainError("p-Miller-Rabin requires a prime p");
  Natural K = N - 1;
  if (!mpz_divisible_ui_p(K.get_mpz_t(), p))
    throw DomainError(std::to_string(p) + " does not divide N - 1");
  std::uint64_t n = 0;
  while (mpz_divisible_ui_p(K.get_mpz_t(), p)) {
    mpz_divexact_ui(K.get_mpz_t(), K.get_mpz_t(), p);
    ++n;
  }
  if (auto early = detail::screen_base(TestKind::p_miller_rabin, N, a)) return *early;
  const Natural s0 = mod_pow(a, K, N, counter);
  if (s0 == 1) {
    auto v = detail::make_verdict(Outcome::probable_prime, TestKind::p_miller_rabin, N, a);
    v.note = std::to_string(p) + "-strong";
    return v;
  }
  // Phi_p(S_j) == 0 forces S_(j+1) == 1, so only the first 1 in the chain
  // can carry a vanishing Phi_p.
  const detail::PowerStepper step(p, N, counter, options);
  const auto walk = detail::walk_chain(s0, 0, n, step);
  switch (walk.end) {
    case detail::ChainWalk::End::factor:
      return detail::factor_found(TestKind::p_miller_rabin, N, a, walk.factor);
    case detail::ChainWalk::End::exhausted:
      return detail::composite(TestKind::p_miller_rabin, N, a, detail::fermat_fail());
    case detail::ChainWalk::End::hit_one: break;
  }
  if (phi_p_eval(walk.previous, p, N, counter) == 0) {
    auto v = detail::make_verdict(Outcome::probable_prime, TestKind::p_miller_rabin, N, a);
    v.note = std::to_string(p) + "-strong";
    return v;
  }
  return detail::composite(TestKind::p_miller_rabin, N, a,
                           detail::chain_break(p, K, walk.index));
}

inline TestVerdict p_miller_rabin(const Natural& N, std::uint64_t p, const Natural& a) {
  OpCounter scratch;
  return p_miller_rabin(N, p, a, scratch);
}

/// p-strong to base a for every prime p dividing N - 1. A composite
/// verdict carries the failing prime in its witness.
inline TestVerdict complete_strong(const Natural& N, const Natural& a, OpCounter& counter,
                                   std::uint64_t factor_budget = kDefaultRhoBudget) {
  if (N < 3) throw DomainError("complete strong test requires N >= 3");
  const Factorization f = factorize(N - 1, factor_budget);
  if (!f.complete())
    throw ResourceError("could not factor N - 1; unfactored cofactor " + to_decimal(*f.cofactor));
  for (const auto& [q, e] : f.factors) {
    if (!q.fits_ulong_p())
      throw ResourceError("prime factor " + to_decimal(q) + " of N - 1 exceeds 64 bits");
    auto v = p_miller_rabin(N, q.get_ui(), a, counter);
    if (v.outcome != Outcome::probable_prime) {
      v.kind = TestKind::complete_strong;
      if (v.witness && v.witness->reason != WitnessReason::chain_break) v.witness->p = q.get_ui();
      v.note = "fails for q = " + to_decimal(q);
      return v;
    }
  }
  auto v = detail::make_verdict(Outcome::probable_prime, TestKind::complete_strong, N, a);
  v.note = "complete-strong";
  return v;
}

inline TestVerdict complete_strong(const Natural& N, const Natural& a) {
  OpCounter scratch;
  return complete_strong(N, a, scratch);
}

/// Chain S_0 = a^K, S_i = S_(i-1)^p. At the first S_j == 1, Phi_p(S_(j-1))
/// == 0 with p^(2j) > K p^n proves primality; without the threshold the
/// result is only a p-strong probable prime.
inline TestVerdict certify_alg1(const ProthForm& form, const Natural& a, OpCounter& counter,
                                const ChainOptions& options = {}) {
  constexpr auto kind = TestKind::certify_alg1;
  const Natural& N = form.N();
  if (auto early = detail::screen_base(kind, N, a)) return *early;
  const Natural s0 = mod_pow(a, form.K(), N, counter);
  if (s0 == 1) {
    auto v = detail::make_verdict(Outcome::probable_prime, kind, N, a);
    v.note = "S_0 == 1";
    return v;
  }
  const detail::PowerStepper step(form.p(), N, counter, options);
  const auto walk = detail::walk_chain(s0, 0, form.n(), step);
  switch (walk.end) {
    case detail::ChainWalk::End::factor: return detail::factor_found(kind, N, a, walk.factor);
    case detail::ChainWalk::End::exhausted:
      return detail::composite(kind, N, a, detail::fermat_fail());
    case detail::ChainWalk::End::hit_one: break;
  }
  if (phi_p_eval(walk.previous, form.p(), N, counter) != 0)
    return detail::composite(kind, N, a, detail::chain_break(form.p(), form.K(), walk.index));
  if (!threshold_ok(form, walk.index)) {
    auto v = detail::make_verdict(Outcome::probable_prime, kind, N, a);
    v.note = "j = " + std::to_string(walk.index) + " below threshold";
    return v;
  }
  auto v = detail::make_verdict(Outcome::prime, kind, N, a);
  v.certificate = detail::make_certificate(form, a, walk.index, kind, walk.previous);
  return v;
}

inline TestVerdict certify_alg1(const ProthForm& form, const Natural& a) {
  OpCounter scratch;
  return certify_alg1(form, a, scratch);
}

/// Starts the chain at S_J with J = compute_J(form); any S_i == 1 found
/// afterwards is above the threshold, so the verdict is decisive unless
/// S_J == 1 already.
inline TestVerdict certify_alg2(const ProthForm& form, const Natural& a, OpCounter& counter,
                                const ChainOptions& options = {}) {
  constexpr auto kind = TestKind::certify_alg2;
  detail::require_generalized(form, "algorithm 2");
  const Natural& N = form.N();
  if (auto early = detail::screen_base(kind, N, a)) return *early;
  const std::uint64_t J = compute_J(form);
  const detail::PowerStepper step(form.p(), N, counter, options);
  // S_J = a^(K p^J), built as a^K followed by J p-th powers
  Natural s = mod_pow(a, form.K(), N, counter);
  for (std::uint64_t i = 0; i < J; ++i) {
    auto next = step(s);
    if (auto* f = std::get_if<FactorFound>(&next))
      return detail::factor_found(kind, N, a, f->factor);
    s = std::get<Natural>(std::move(next));
  }
  if (s == 1) {
    auto v = detail::make_verdict(Outcome::probable_prime, kind, N, a);
    v.note = "S_J == 1 with J = " + std::to_string(J);
    return v;
  }
  const auto walk = detail::walk_chain(s, J, form.n(), step);
  switch (walk.end) {
    case detail::ChainWalk::End::factor: return detail::factor_found(kind, N, a, walk.factor);
    case detail::ChainWalk::End::exhausted:
      return detail::composite(kind, N, a, detail::fermat_fail());
    case detail::ChainWalk::End::hit_one: break;
  }
  if (phi_p_eval(walk.previous, form.p(), N, counter) != 0)
    return detail::composite(kind, N, a, detail::chain_break(form.p(), form.K(), walk.index));
  auto v = detail::make_verdict(Outcome::prime, kind, N, a);
  v.certificate = detail::make_certificate(form, a, walk.index, kind, walk.previous);
  return v;
}

inline TestVerdict certify_alg2(const ProthForm& form, const Natural& a) {
  OpCounter scratch;
  return certify_alg2(form, a, scratch);
}

struct InconclusiveProbability {
  mpq_class value;
  bool meaningful = true;  // false when N is composite; the formula assumes N prime
};

/// (K p^J - 1) / (K p^n - 1): the share of bases in [2, N-1] for which
/// algorithm 2 stops at S_J == 1 on a prime N.
inline InconclusiveProbability inconclusive_probability(const ProthForm& form) {
  detail::require_generalized(form, "inconclusive probability");
  const std::uint64_t J = compute_J(form);
  InconclusiveProbability out;
  out.value = mpq_class(form.K() * pow_ui(form.p(), J) - 1, form.N_minus_1() - 1);
  out.value.canonicalize();
  out.meaningful = mpz_probab_prime_p(form.N().get_mpz_t(), 30) > 0;
  return out;
}

/// Re-derives both conditions of a certificate from its own fields.
inline bool verify_certificate(const PrimalityCertificate& c) {
  if (!test_kind_from_string(c.algorithm)) return false;
  if (c.K < 1 || c.n < 1 || !is_prime_u64(c.p)) return false;
  if (mpz_divisible_ui_p(c.K.get_mpz_t(), c.p)) return false;
  const Natural N = c.K * pow_ui(c.p, c.n) + 1;
  if (N != c.N) return false;
  if (c.index < 1 || c.index > c.n) return false;
  if (c.base <= 1 || c.base >= N) return false;  // canonical residue only
  if (pow_ui(c.p, 2 * c.index) <= N - 1) return false;
  OpCounter scratch;
  const Natural s_prev = mod_pow(c.base, c.K * pow_ui(c.p, c.index - 1), N, scratch);
  if (c.s_prev && *c.s_prev != s_prev) return false;
  if (c.s_index && *c.s_index != mod_pow(s_prev, Natural(c.p), N, scratch)) return false;
  return phi_p_eval(s_prev, c.p, N, scratch) == 0;
}

/// Re-checks a compositeness witness against N in one computation.
inline bool verify_witness(const Natural& N, const CompositenessWitness& w) {
  if (N < 3) return false;
  OpCounter scratch;
  switch (w.reason) {
    case WitnessReason::factor_found:
    case WitnessReason::pocklington_gcd:
      return w.factor > 1 && w.factor < N && mpz_divisible_p(N.get_mpz_t(), w.factor.get_mpz_t());
    case WitnessReason::fermat_fail:
      return gcd(w.base, N) == 1 && mod_pow(w.base, N - 1, N, scratch) != 1;
    case WitnessReason::euler_fail: {
      if (mpz_even_p(N.get_mpz_t()) || gcd(w.base, N) != 1 || w.exponent != (N - 1) / 2)
        return false;
      const Natural y = mod_pow(w.base, w.exponent, N, scratch);
      const int symbol = jacobi(w.base, N);
      const Natural expected = symbol == 1 ? Natural(1) : N - 1;
      return symbol == w.jacobi && y != expected;
    }
    case WitnessReason::chain_break: {
      if (w.p < 2 || !is_prime_u64(w.p) || gcd(w.base, N) != 1) return false;
      const Natural s = mod_pow(w.base, w.exponent, N, scratch);
      return s != 1 && mod_pow(s, Natural(w.p), N, scratch) == 1 &&
             phi_p_eval(s, w.p, N, scratch) != 0;
    }
  }
  return false;
}

inline const std::vector<Natural>& default_bases() {
  static const std::vector<Natural> bases{2, 3, 5, 7};
  return bases;
}

inline constexpr std::size_t kDefaultRetryCap = 4;

struct CertifyResult {
  TestVerdict verdict;
  std::vector<Natural> attempted;
};

/// Runs a certifier with the first base, moving to the next base of the
/// default sequence while the result is only a probable prime.
inline CertifyResult certify_with_retries(const ProthForm& form, int algorithm,
                                          std::optional<Natural> first_base, OpCounter& counter,
                                          std::size_t cap = kDefaultRetryCap,
                                          const ChainOptions& options = {}) {
  if (algorithm != 1 && algorithm != 2) throw DomainError("algorithm must be 1 or 2");
  if (cap == 0) throw DomainError("retry cap must be positive");
  std::vector<Natural> bases;
  if (first_base) bases.push_back(*first_base);
  for (const auto& b : default_bases())
    if (!first_base || b != *first_base) bases.push_back(b);
  if (bases.size() > cap) bases.resize(cap);
  CertifyResult out;
  for (const auto& a : bases) {
    out.attempted.push_back(a);
    out.verdict = algorithm == 1 ? certify_alg1(form, a, counter, options)
                                 : certify_alg2(form, a, counter, options);
    if (out.verdict.outcome == Outcome::prime || out.verdict.outcome == Outcome::composite) break;
  }
  return out;
}

}  // namespace genproth
