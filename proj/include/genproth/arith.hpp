#pragma once

// Modular arithmetic kernel: instrumented powers, p-th power schedules,
// cyclotomic evaluation and inverses. Values are GMP integers; every
// modular product is reported to an OpCounter so the certifiers' costs
// can be read off exactly.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace genproth {

using Natural = mpz_class;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OpCounter {
  std::uint64_t squarings = 0;
  std::uint64_t multiplications = 0;
  std::uint64_t inversions = 0;
  std::uint64_t reductions = 0;

  std::uint64_t products() const { return squarings + multiplications; }

  OpCounter& operator+=(const OpCounter& o) {
    squarings += o.squarings;
    multiplications += o.multiplications;
    inversions += o.inversions;
    reductions += o.reductions;
    return *this;
  }
  bool operator==(const OpCounter&) const = default;
};

/// Relative cost of one modular inversion, in units of one modular product.
struct CostModel {
  double inversion_weight = 4.0;

  double weigh(const OpCounter& c) const {
    return static_cast<double>(c.products()) +
           inversion_weight * static_cast<double>(c.inversions);
  }
};

namespace detail {

/// Residue ring Z/mZ with every product tallied.
class CountingRing {
 public:
  CountingRing(const Natural& modulus, OpCounter& counter)
      : modulus_(modulus), counter_(counter) {}

  const Natural& modulus() const { return modulus_; }

  Natural reduce(const Natural& x) const {
    Natural r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), modulus_.get_mpz_t());
    ++counter_.reductions;
    return r;
  }
  Natural square(const Natural& x) const {
    ++counter_.squarings;
    return product(x, x);
  }
  Natural multiply(const Natural& x, const Natural& y) const {
    ++counter_.multiplications;
    return product(x, y);
  }
  // Additions are not products; they are reduced but not counted.
  Natural add(const Natural& x, const Natural& y) const {
    Natural r = x + y;
    if (r >= modulus_) r -= modulus_;
    return r;
  }

 private:
  Natural product(const Natural& x, const Natural& y) const {
    Natural r;
    mpz_mul(r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), modulus_.get_mpz_t());
    ++counter_.reductions;
    return r;
  }

  const Natural& modulus_;
  OpCounter& counter_;
};

inline void require_modulus(const Natural& modulus) {
  if (modulus < 2) throw DomainError("modulus must be at least 2");
}

}  // namespace detail

/// base^exponent mod modulus by left-to-right binary exponentiation.
/// Costs bitlen(e)-1 squarings and popcount(e)-1 multiplications.
inline Natural mod_pow(const Natural& base, const Natural& exponent,
                       const Natural& modulus, OpCounter& counter) {
  detail::require_modulus(modulus);
  if (exponent < 0) throw DomainError("negative exponent");
  if (exponent == 0) return Natural(1);
  const detail::CountingRing ring(modulus, counter);
  const Natural x = ring.reduce(base);
  Natural acc = x;
  const std::size_t bits = mpz_sizeinbase(exponent.get_mpz_t(), 2);
  for (std::size_t i = bits - 1; i-- > 0;) {
    acc = ring.square(acc);
    if (mpz_tstbit(exponent.get_mpz_t(), i)) acc = ring.multiply(acc, x);
  }
  return acc;
}

inline Natural mod_pow(const Natural& base, const Natural& exponent,
                       const Natural& modulus) {
  OpCounter scratch;
  return mod_pow(base, exponent, modulus, scratch);
}

struct NonInvertible {
  Natural gcd;
};

using InverseResult = std::variant<Natural, NonInvertible>;

inline InverseResult mod_inverse(const Natural& x, const Natural& modulus) {
  detail::require_modulus(modulus);
  Natural g, s;
  Natural r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), modulus.get_mpz_t());
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), nullptr, r.get_mpz_t(),
             modulus.get_mpz_t());
  if (g != 1) return NonInvertible{g};
  mpz_mod(s.get_mpz_t(), s.get_mpz_t(), modulus.get_mpz_t());
  return s;
}

enum class StepKind : std::uint8_t { square, multiply, multiply_inverse };

/// Straight-line plan for x -> x^p. The accumulator starts at x (the
/// leading digit) and each step transforms it.
struct PowerSchedule {
  std::uint64_t exponent = 0;
  std::vector<StepKind> steps;
  std::uint64_t predicted_squarings = 0;
  std::uint64_t predicted_multiplications = 0;
  std::uint64_t predicted_inversions = 0;

  bool uses_inverse() const { return predicted_inversions > 0; }

  /// Products executed per application: squarings + both multiply kinds.
  std::uint64_t predicted_products() const {
    return predicted_squarings + predicted_multiplications +
           predicted_inversions;
  }

  /// One extended-gcd inversion is paid per application if any step needs x^-1.
  double predicted_cost(const CostModel& model) const {
    return static_cast<double>(predicted_products()) +
           (uses_inverse() ? model.inversion_weight : 0.0);
  }
};

namespace detail {

inline PowerSchedule schedule_from_digits(std::uint64_t p,
                                          const std::vector<int>& digits_lsb) {
  PowerSchedule s;
  s.exponent = p;
  for (std::size_t i = digits_lsb.size() - 1; i-- > 0;) {
    s.steps.push_back(StepKind::square);
    ++s.predicted_squarings;
    if (digits_lsb[i] == 1) {
      s.steps.push_back(StepKind::multiply);
      ++s.predicted_multiplications;
    } else if (digits_lsb[i] == -1) {
      s.steps.push_back(StepKind::multiply_inverse);
      ++s.predicted_inversions;
    }
  }
  return s;
}

inline void require_schedule_exponent(std::uint64_t p) {
  if (p < 2) throw DomainError("schedule exponent must be at least 2");
}

}  // namespace detail

/// Plain square-and-multiply plan over the binary digits of p.
inline PowerSchedule binary_schedule(std::uint64_t p) {
  detail::require_schedule_exponent(p);
  std::vector<int> digits;
  for (std::uint64_t k = p; k > 0; k >>= 1) digits.push_back(int(k & 1));
  return detail::schedule_from_digits(p, digits);
}

/// Non-adjacent-form plan. For p = 2^s - 1 this is s squarings and one
/// multiply by x^-1; for p = 2^s + 1, s squarings and one multiply. The NAF
/// has minimal weight, so its multiply count never exceeds binary's.
inline PowerSchedule build_schedule(std::uint64_t p) {
  detail::require_schedule_exponent(p);
  std::vector<int> digits;
  // unsigned __int128 guards the k + 1 step when p is near 2^64
  unsigned __int128 k = p;
  while (k > 0) {
    int d = 0;
    if (k & 1) {
      d = (k & 3) == 1 ? 1 : -1;
      if (d == 1)
        k -= 1;
      else
        k += 1;
    }
    digits.push_back(d);
    k >>= 1;
  }
  return detail::schedule_from_digits(p, digits);
}

/// Plan actually used when scheduling is enabled: the NAF plan unless its
/// weighted cost is higher than binary's.
inline PowerSchedule select_schedule(std::uint64_t p, const CostModel& model) {
  PowerSchedule naf = build_schedule(p);
  PowerSchedule bin = binary_schedule(p);
  return naf.predicted_cost(model) <= bin.predicted_cost(model) ? naf : bin;
}

/// Exponent obtained by replaying the schedule on a formal variable.
inline unsigned __int128 replay_exponent(const PowerSchedule& s) {
  unsigned __int128 e = 1;
  for (StepKind k : s.steps) {
    switch (k) {
      case StepKind::square: e *= 2; break;
      case StepKind::multiply: e += 1; break;
      case StepKind::multiply_inverse: e -= 1; break;
    }
  }
  return e;
}

struct FactorFound {
  Natural factor;
};

using PowResult = std::variant<Natural, FactorFound>;

/// x^p mod modulus following the schedule. When the schedule needs x^-1
/// and x shares a factor with the modulus, that factor is returned.
inline PowResult pow_p_scheduled(const Natural& x, const PowerSchedule& schedule,
                                 const Natural& modulus, OpCounter& counter) {
  detail::require_modulus(modulus);
  const detail::CountingRing ring(modulus, counter);
  const Natural base = ring.reduce(x);
  if (base == 0) return Natural(0);
  Natural inverse;
  if (schedule.uses_inverse()) {
    ++counter.inversions;
    auto inv = mod_inverse(base, modulus);
    if (auto* bad = std::get_if<NonInvertible>(&inv)) return FactorFound{bad->gcd};
    inverse = std::get<Natural>(inv);
  }
  Natural acc = base;
  for (StepKind k : schedule.steps) {
    switch (k) {
      case StepKind::square: acc = ring.square(acc); break;
      case StepKind::multiply: acc = ring.multiply(acc, base); break;
      case StepKind::multiply_inverse: acc = ring.multiply(acc, inverse); break;
    }
  }
  return acc;
}

/// Phi_p(x) = 1 + x + ... + x^(p-1) mod modulus, by binary splitting of the
/// geometric sum: G(2m) = G(m)(1 + x^m), G(2m+1) = G(2m) + x^(2m).
/// Uses at most 2*floor(log2 p) + popcount(p) products.
inline Natural phi_p_eval(const Natural& x, std::uint64_t p,
                          const Natural& modulus, OpCounter& counter) {
  detail::require_modulus(modulus);
  if (p < 2) throw DomainError("cyclotomic index must be at least 2");
  const detail::CountingRing ring(modulus, counter);
  const Natural base = ring.reduce(x);
  const Natural one_mod = ring.reduce(Natural(1));
  // invariant: sum = G(m), power = x^m
  Natural sum = one_mod;
  Natural power = base;
  int top = 63 - __builtin_clzll(p);
  for (int i = top - 1; i >= 0; --i) {
    const bool last = i == 0;
    const bool bit = (p >> i) & 1;
    const Natural factor = ring.add(one_mod, power);
    sum = (i == top - 1) ? factor : ring.multiply(sum, factor);
    if (!last || bit) power = ring.square(power);
    if (bit) {
      sum = ring.add(sum, power);
      if (!last) power = ring.multiply(power, base);
    }
  }
  return sum;
}

inline Natural phi_p_eval(const Natural& x, std::uint64_t p,
                          const Natural& modulus) {
  OpCounter scratch;
  return phi_p_eval(x, p, modulus, scratch);
}

inline Natural gcd(const Natural& a, const Natural& b) {
  Natural g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline std::string to_decimal(const Natural& x) { return x.get_str(10); }

/// Strict decimal parse; rejects signs, whitespace and empty input.
inline Natural parse_natural(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty integer");
  for (char c : text)
    if (c < '0' || c > '9')
      throw std::invalid_argument("not a decimal integer: " + text);
  return Natural(text, 10);
}

}  // namespace genproth
