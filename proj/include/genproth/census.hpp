#pragma once

// Pseudoprime census over odd composites and family searches K p^n + 1.

#include <genproth/factor.hpp>
#include <genproth/forms.hpp>
#include <genproth/oracle.hpp>
#include <genproth/primality.hpp>

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace genproth {

enum class CensusKind { p_strong, complete_strong };

inline std::string_view to_string(CensusKind k) {
  return k == CensusKind::p_strong ? "p-strong" : "complete-strong";
}

struct CensusRecord {
  std::uint64_t N = 0;
  CensusKind kind = CensusKind::p_strong;
  std::optional<std::uint64_t> p;
  std::vector<std::uint64_t> bases;
  std::vector<PrimePower> factors;  // of N - 1
};

struct CensusResult {
  std::vector<CensusRecord> records;
  std::vector<std::string> skipped;  // diagnostics for unfactorable N - 1
};

struct CensusQuery {
  CensusKind kind = CensusKind::p_strong;
  std::optional<std::uint64_t> p;
  std::vector<std::uint64_t> bases;
  std::uint64_t limit = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

inline bool passes(const CensusQuery& q, std::uint64_t N, CensusResult& out) {
  const Natural big(N);
  if (q.kind == CensusKind::p_strong) {
    for (auto a : q.bases)
      if (p_miller_rabin(big, *q.p, Natural(a)).outcome != Outcome::probable_prime) return false;
    return true;
  }
  // every complete strong probable prime is in particular 2-strong
  for (auto a : q.bases)
    if (p_miller_rabin(big, 2, Natural(a)).outcome != Outcome::probable_prime) return false;
  try {
    for (auto a : q.bases)
      if (complete_strong(big, Natural(a)).outcome != Outcome::probable_prime) return false;
  } catch (const ResourceError& e) {
    out.skipped.push_back(std::to_string(N) + ": " + e.what());
    return false;
  }
  return true;
}

inline CensusResult scan_range(const CensusQuery& q, const SieveOracle& sieve,
                               std::uint64_t lo, std::uint64_t hi) {
  CensusResult out;
  std::uint64_t start = std::max<std::uint64_t>(lo, 9) | 1;
  for (std::uint64_t N = start; N < hi; N += 2) {
    if (sieve.is_prime(N)) continue;
    if (q.kind == CensusKind::p_strong && (N - 1) % *q.p != 0) continue;
    if (!passes(q, N, out)) continue;
    CensusRecord r;
    r.N = N;
    r.kind = q.kind;
    r.p = q.p;
    r.bases = q.bases;
    r.factors = factorize(Natural(N - 1)).factors;
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

/// Every odd composite N < limit passing the named test for all bases,
/// ascending. For p-strong only N = 1 mod p are candidates.
inline CensusResult enumerate_pseudoprimes(const CensusQuery& q, const SieveOracle& sieve) {
  if (q.bases.empty()) throw DomainError("census needs at least one base");
  if (q.kind == CensusKind::p_strong && (!q.p || !is_prime_u64(*q.p)))
    throw DomainError("p-strong census needs a prime p");
  if (q.kind == CensusKind::complete_strong && q.p)
    throw DomainError("complete-strong census takes no p");
  if (q.limit > sieve.limit()) throw DomainError("census limit beyond sieve limit");
  for (auto a : q.bases)
    if (a < 2) throw DomainError("bases must be at least 2");

  unsigned workers = q.threads ? q.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t span = q.limit;
  const std::uint64_t chunks = std::min<std::uint64_t>(workers * 4, std::max<std::uint64_t>(1, span / 4096));
  const std::uint64_t width = span / chunks + 1;

  CensusResult merged;
  if (workers == 1 || chunks == 1) {
    merged = detail::scan_range(q, sieve, 0, q.limit);
  } else {
    std::vector<std::future<CensusResult>> parts;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      const std::uint64_t lo = c * width;
      const std::uint64_t hi = std::min(q.limit, lo + width);
      parts.push_back(std::async(std::launch::async, [&, lo, hi] {
        return detail::scan_range(q, sieve, lo, hi);
      }));
    }
    // chunk order is ascending N
    for (auto& f : parts) {
      CensusResult r = f.get();
      merged.records.insert(merged.records.end(), r.records.begin(), r.records.end());
      merged.skipped.insert(merged.skipped.end(), r.skipped.begin(), r.skipped.end());
    }
  }
  return merged;
}

inline CensusResult enumerate_pseudoprimes(const CensusQuery& q) {
  return enumerate_pseudoprimes(q, build_sieve(std::max<std::uint64_t>(q.limit, 3)));
}

struct SearchEntry {
  std::uint64_t n = 0;
  std::optional<ProthForm> form;
  std::optional<TestVerdict> verdict;
  std::vector<Natural> attempted;
  std::optional<bool> oracle_prime;  // set when N is small enough to check
  std::string error;
};

/// Runs algorithm 2 (with base retries) on K p^n + 1 for n in
/// [n_from, n_to]. Constraints that do not depend on n are checked up
/// front and thrown; per-n failures are recorded in the entry.
inline std::vector<SearchEntry> search_family(const Natural& K, std::uint64_t p,
                                              std::uint64_t n_from, std::uint64_t n_to,
                                              const Natural& base,
                                              const SieveOracle* sieve = nullptr,
                                              std::size_t retry_cap = kDefaultRetryCap) {
  make_form(K, p, 1);
  std::vector<SearchEntry> out;
  for (std::uint64_t n = std::max<std::uint64_t>(n_from, 1); n <= n_to && n_from <= n_to; ++n) {
    SearchEntry e;
    e.n = n;
    try {
      e.form = make_form(K, p, n);
      OpCounter counter;
      auto r = certify_with_retries(*e.form, 2, base, counter, retry_cap);
      e.verdict = std::move(r.verdict);
      e.attempted = std::move(r.attempted);
      const Natural& N = e.form->N();
      if (sieve && N < sieve->limit())
        e.oracle_prime = sieve->is_prime(N.get_ui());
      else if (N.fits_ulong_p())
        e.oracle_prime = is_prime_u64(N.get_ui());
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace genproth
