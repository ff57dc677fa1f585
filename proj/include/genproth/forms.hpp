#pragma once

// N = K * p^n + 1 and the exact integer forms of every log_p threshold.

#include <genproth/arith.hpp>
#include <genproth/oracle.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace genproth {

enum class FormViolation { zero_multiplier, exponent_too_small, composite_base, shared_factor };

inline const char* describe(FormViolation v) {
  switch (v) {
    case FormViolation::zero_multiplier: return "K must be at least 1";
    case FormViolation::exponent_too_small: return "n must be at least 1";
    case FormViolation::composite_base: return "p must be a prime below 2^64";
    case FormViolation::shared_factor: return "gcd(K, p) must be 1";
  }
  return "invalid form";
}

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(FormViolation v)
      : std::invalid_argument(describe(v)), violation_(v) {}
  FormViolation violation() const { return violation_; }

 private:
  FormViolation violation_;
};

struct FormClass {
  bool generalized = false;    // K < p^n
  bool proth_classic = false;  // p = 2, K odd, K < 2^n
};

/// Immutable validated form; construct with make_form.
class ProthForm {
 public:
  const Natural& K() const { return K_; }
  std::uint64_t p() const { return p_; }
  std::uint64_t n() const { return n_; }
  const Natural& N() const { return N_; }
  /// p^n, cached.
  const Natural& p_power() const { return p_power_; }
  /// N - 1 = K * p^n.
  Natural N_minus_1() const { return N_ - 1; }
  const FormClass& form_class() const { return class_; }
  bool generalized() const { return class_.generalized; }

  std::string to_string() const {
    return to_decimal(K_) + "*" + std::to_string(p_) + "^" + std::to_string(n_) + "+1";
  }

  bool operator==(const ProthForm& o) const {
    return K_ == o.K_ && p_ == o.p_ && n_ == o.n_;
  }

 private:
  friend ProthForm make_form(const Natural&, std::uint64_t, std::uint64_t);
  ProthForm() = default;

  Natural K_;
  std::uint64_t p_ = 0;
  std::uint64_t n_ = 0;
  Natural p_power_;
  Natural N_;
  FormClass class_;
};

inline Natural pow_ui(std::uint64_t base, std::uint64_t exponent) {
  Natural r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exponent);
  return r;
}

/// Throws ValidationError naming the first violated constraint.
inline ProthForm make_form(const Natural& K, std::uint64_t p, std::uint64_t n) {
  if (K < 1) throw ValidationError(FormViolation::zero_multiplier);
  if (n < 1) throw ValidationError(FormViolation::exponent_too_small);
  if (!is_prime_u64(p)) throw ValidationError(FormViolation::composite_base);
  if (mpz_divisible_ui_p(K.get_mpz_t(), p)) throw ValidationError(FormViolation::shared_factor);
  ProthForm f;
  f.K_ = K;
  f.p_ = p;
  f.n_ = n;
  f.p_power_ = pow_ui(p, n);
  f.N_ = K * f.p_power_ + 1;
  f.class_.generalized = K < f.p_power_;
  f.class_.proth_classic = p == 2 && mpz_odd_p(K.get_mpz_t()) && f.class_.generalized;
  return f;
}

/// Largest J >= 0 with p^(2J) <= K * p^n, i.e. floor((log_p K + n) / 2).
inline std::uint64_t compute_J(const ProthForm& form) {
  const Natural target = form.N_minus_1();
  // p^(2*floor(n/2)) <= p^n <= K p^n always holds
  std::uint64_t J = form.n() / 2;
  Natural square = pow_ui(form.p(), 2 * (J + 1));
  const Natural step = Natural(form.p()) * form.p();
  while (square <= target) {
    ++J;
    square *= step;
  }
  return J;
}

/// p^(2j) > K * p^n, strictly. Equality fails.
inline bool threshold_ok(const ProthForm& form, std::uint64_t j) {
  return pow_ui(form.p(), 2 * j) > form.N_minus_1();
}

/// Parses "K*p^n+1". Whitespace is not accepted.
inline ProthForm parse_form(const std::string& text) {
  const auto star = text.find('*');
  const auto caret = text.find('^', star == std::string::npos ? 0 : star);
  const auto plus = text.find('+', caret == std::string::npos ? 0 : caret);
  if (star == std::string::npos || caret == std::string::npos || plus == std::string::npos ||
      text.substr(plus) != "+1")
    throw std::invalid_argument("expected K*p^n+1, got '" + text + "'");
  const Natural K = parse_natural(text.substr(0, star));
  const Natural p = parse_natural(text.substr(star + 1, caret - star - 1));
  const Natural n = parse_natural(text.substr(caret + 1, plus - caret - 1));
  if (!p.fits_ulong_p() || !n.fits_ulong_p())
    throw std::invalid_argument("p and n must fit in 64 bits");
  return make_form(K, p.get_ui(), n.get_ui());
}

}  // namespace genproth
