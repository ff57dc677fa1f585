#pragma once

// Text records: certificates as flat key=value lines, everything else as
// one JSON object per line. Integers that can exceed 64 bits are decimal
// strings.

#include <genproth/bench.hpp>
#include <genproth/census.hpp>
#include <genproth/verdict.hpp>

#include <json.hpp>

#include <set>
#include <sstream>
#include <string>

namespace genproth {

using Json = nlohmann::ordered_json;

class RecordError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const Natural v = parse_natural(text);
  if (!v.fits_ulong_p()) throw RecordError(key + " does not fit in 64 bits");
  return v.get_ui();
}

}  // namespace detail

inline std::string certificate_to_text(const PrimalityCertificate& c) {
  std::ostringstream out;
  out << "algorithm=" << c.algorithm << '\n'
      << "K=" << to_decimal(c.K) << '\n'
      << "p=" << c.p << '\n'
      << "n=" << c.n << '\n'
      << "N=" << to_decimal(c.N) << '\n'
      << "a=" << to_decimal(c.base) << '\n'
      << "j=" << c.index << '\n';
  if (c.s_prev) out << "S_prev=" << to_decimal(*c.s_prev) << '\n';
  if (c.s_index) out << "S_j=" << to_decimal(*c.s_index) << '\n';
  return out.str();
}

inline Json certificate_to_json(const PrimalityCertificate& c) {
  Json j;
  j["algorithm"] = c.algorithm;
  j["K"] = to_decimal(c.K);
  j["p"] = std::to_string(c.p);
  j["n"] = std::to_string(c.n);
  j["N"] = to_decimal(c.N);
  j["a"] = to_decimal(c.base);
  j["j"] = std::to_string(c.index);
  if (c.s_prev) j["S_prev"] = to_decimal(*c.s_prev);
  if (c.s_index) j["S_j"] = to_decimal(*c.s_index);
  return j;
}

/// Builds a certificate from key/value pairs; every required key must be
/// present exactly once and no unknown key is accepted.
inline PrimalityCertificate certificate_from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::set<std::string> seen;
  PrimalityCertificate c;
  for (const auto& [key, value] : pairs) {
    if (!seen.insert(key).second) throw RecordError("duplicate key " + key);
    try {
      if (key == "algorithm") c.algorithm = value;
      else if (key == "K") c.K = parse_natural(value);
      else if (key == "p") c.p = detail::parse_u64(key, value);
      else if (key == "n") c.n = detail::parse_u64(key, value);
      else if (key == "N") c.N = parse_natural(value);
      else if (key == "a") c.base = parse_natural(value);
      else if (key == "j") c.index = detail::parse_u64(key, value);
      else if (key == "S_prev") c.s_prev = parse_natural(value);
      else if (key == "S_j") c.s_index = parse_natural(value);
      else throw RecordError("unknown key " + key);
    } catch (const RecordError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw RecordError(key + ": " + e.what());
    }
  }
  for (const char* required : {"algorithm", "K", "p", "n", "N", "a", "j"})
    if (!seen.count(required)) throw RecordError(std::string("missing key ") + required);
  return c;
}

inline PrimalityCertificate certificate_from_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw RecordError("expected key=value, got '" + line + "'");
    pairs.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return certificate_from_pairs(pairs);
}

inline PrimalityCertificate certificate_from_json(const Json& j) {
  if (!j.is_object()) throw RecordError("certificate must be a JSON object");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) throw RecordError(it.key() + " must be a decimal string");
    pairs.emplace_back(it.key(), it.value().get<std::string>());
  }
  return certificate_from_pairs(pairs);
}

inline Json witness_to_json(const CompositenessWitness& w) {
  Json j;
  j["reason"] = std::string(to_string(w.reason));
  j["base"] = to_decimal(w.base);
  switch (w.reason) {
    case WitnessReason::chain_break:
      j["p"] = std::to_string(w.p);
      j["exponent"] = to_decimal(w.exponent);
      break;
    case WitnessReason::euler_fail:
      j["exponent"] = to_decimal(w.exponent);
      j["jacobi"] = w.jacobi;
      break;
    case WitnessReason::factor_found:
    case WitnessReason::pocklington_gcd: j["factor"] = to_decimal(w.factor); break;
    case WitnessReason::fermat_fail:
      if (w.p) j["p"] = std::to_string(w.p);
      break;
  }
  return j;
}

inline Json verdict_to_json(const TestVerdict& v, const std::optional<ProthForm>& form = std::nullopt) {
  Json j;
  if (form) j["form"] = form->to_string();
  j["N"] = to_decimal(v.N);
  j["method"] = std::string(to_string(v.kind));
  j["base"] = to_decimal(v.base);
  j["outcome"] = std::string(to_string(v.outcome));
  if (!v.note.empty()) j["note"] = v.note;
  if (v.certificate) j["certificate"] = certificate_to_json(*v.certificate);
  if (v.witness) j["witness"] = witness_to_json(*v.witness);
  return j;
}

inline Json census_record_to_json(const CensusRecord& r) {
  Json j;
  j["n"] = r.N;
  j["kind"] = std::string(to_string(r.kind));
  j["p"] = r.p ? Json(*r.p) : Json(nullptr);
  j["bases"] = r.bases;
  Json factors = Json::array();
  for (const auto& f : r.factors) factors.push_back(Json::array({f.prime.get_ui(), f.exponent}));
  j["factors"] = factors;
  return j;
}

inline Json report_to_json(const OpCountReport& r) {
  Json j;
  j["form"] = r.form;
  j["algorithm"] = r.algorithm;
  j["mode"] = std::string(to_string(r.mode));
  j["digits"] = r.digits;
  j["squarings"] = r.squarings;
  j["multiplications"] = r.multiplications;
  j["inversions"] = r.inversions;
  j["products"] = r.products;
  j["weighted_cost"] = r.weighted_cost;
  j["seconds"] = r.seconds;
  j["outcome"] = std::string(to_string(r.outcome));
  return j;
}

inline Json search_entry_to_json(const SearchEntry& e) {
  Json j;
  j["n"] = e.n;
  if (e.form) j["form"] = e.form->to_string();
  if (!e.error.empty()) {
    j["error"] = e.error;
    return j;
  }
  j["outcome"] = std::string(to_string(e.verdict->outcome));
  Json bases = Json::array();
  for (const auto& a : e.attempted) bases.push_back(to_decimal(a));
  j["bases"] = bases;
  if (e.oracle_prime) j["oracle_prime"] = *e.oracle_prime;
  if (e.verdict->certificate) j["certificate"] = certificate_to_json(*e.verdict->certificate);
  return j;
}

}  // namespace genproth
