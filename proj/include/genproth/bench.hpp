#pragma once

// Operation counts for algorithm 2, per schedule mode, with wall time
// reported alongside.

#include <genproth/forms.hpp>
#include <genproth/primality.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace genproth {

inline std::string_view to_string(ScheduleMode m) {
  return m == ScheduleMode::binary ? "binary" : "scheduled";
}

struct OpCountReport {
  std::string form;
  std::string algorithm = "alg2";
  ScheduleMode mode = ScheduleMode::binary;
  std::uint64_t squarings = 0;
  std::uint64_t multiplications = 0;
  std::uint64_t inversions = 0;
  std::uint64_t products = 0;
  double weighted_cost = 0;
  double seconds = 0;
  std::uint64_t digits = 0;
  Outcome outcome = Outcome::inconclusive;
};

inline constexpr std::uint64_t kDefaultDigitCap = 100'000;

/// Decimal digits of K p^n + 1, from logarithms; exact enough for a cap.
inline std::uint64_t estimate_digits(const Natural& K, std::uint64_t p, std::uint64_t n) {
  long exp2 = 0;
  const double mantissa = mpz_get_d_2exp(&exp2, K.get_mpz_t());
  const double log10K = std::log10(mantissa) + double(exp2) * std::log10(2.0);
  return static_cast<std::uint64_t>(log10K + double(n) * std::log10(double(p))) + 1;
}

inline void check_digit_cap(const Natural& K, std::uint64_t p, std::uint64_t n,
                            std::uint64_t cap) {
  const auto digits = estimate_digits(K, p, n);
  if (digits > cap)
    throw ResourceError(to_decimal(K) + "*" + std::to_string(p) + "^" + std::to_string(n) +
                        "+1 has about " + std::to_string(digits) +
                        " digits, above the cap of " + std::to_string(cap));
}

inline OpCountReport count_certify(const ProthForm& form, const Natural& a, ScheduleMode mode,
                                   const CostModel& cost = {}) {
  OpCounter counter;
  ChainOptions options{mode, cost};
  const auto t0 = std::chrono::steady_clock::now();
  const TestVerdict v = certify_alg2(form, a, counter, options);
  const auto t1 = std::chrono::steady_clock::now();
  OpCountReport r;
  r.form = form.to_string();
  r.mode = mode;
  r.squarings = counter.squarings;
  r.multiplications = counter.multiplications;
  r.inversions = counter.inversions;
  r.products = counter.products();
  r.weighted_cost = cost.weigh(counter);
  r.seconds = std::chrono::duration<double>(t1 - t0).count();
  r.digits = mpz_sizeinbase(form.N().get_mpz_t(), 10);
  // mpz_sizeinbase may overshoot by one
  if (r.digits > 1 && pow_ui(10, r.digits - 1) > form.N()) --r.digits;
  r.outcome = v.outcome;
  return r;
}

inline std::vector<OpCountReport> scaling_run(const Natural& K, std::uint64_t p,
                                              const std::vector<std::uint64_t>& n_list,
                                              const Natural& a, ScheduleMode mode,
                                              const CostModel& cost = {},
                                              std::uint64_t digit_cap = kDefaultDigitCap) {
  if (n_list.empty()) throw DomainError("empty n list");
  for (auto n : n_list) check_digit_cap(K, p, n, digit_cap);
  std::vector<OpCountReport> out;
  for (auto n : n_list) out.push_back(count_certify(make_form(K, p, n), a, mode, cost));
  return out;
}

}  // namespace genproth
