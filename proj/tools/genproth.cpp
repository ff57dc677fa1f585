// genproth: command-line front end for the K*p^n+1 primality library.
//
// Exit status: 0 prime, 1 composite, 2 probable prime or inconclusive,
// 64 usage error, 69 resource limit.

#include <genproth/genproth.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using namespace genproth;

constexpr int kExitPrime = 0;
constexpr int kExitComposite = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitUsage = 64;
constexpr int kExitResource = 69;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::prime: return kExitPrime;
    case Outcome::composite: return kExitComposite;
    case Outcome::probable_prime:
    case Outcome::inconclusive: return kExitUndecided;
  }
  return kExitUndecided;
}

struct FormSpec {
  std::string text;
  std::string K, p, n;

  void add_to(CLI::App* cmd) {
    cmd->add_option("form", text, "Number as K*p^n+1");
    cmd->add_option("--K", K, "Multiplier K");
    cmd->add_option("--p", p, "Prime p");
    cmd->add_option("--n", n, "Exponent n");
  }

  ProthForm resolve() const {
    try {
      if (!text.empty()) {
        if (!K.empty() || !p.empty() || !n.empty())
          throw UsageError("give the form either as K*p^n+1 or with --K/--p/--n, not both");
        return parse_form(text);
      }
      if (K.empty() || p.empty() || n.empty())
        throw UsageError("missing form: give K*p^n+1 or all of --K, --p, --n");
      const Natural pv = parse_natural(p), nv = parse_natural(n);
      if (!pv.fits_ulong_p() || !nv.fits_ulong_p())
        throw UsageError("p and n must fit in 64 bits");
      return make_form(parse_natural(K), pv.get_ui(), nv.get_ui());
    } catch (const UsageError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      const Natural v = parse_natural(item);
      if (!v.fits_ulong_p()) throw std::invalid_argument("too large");
      out.push_back(v.get_ui());
    } catch (const std::invalid_argument&) {
      throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " must not be empty");
  return out;
}

Natural parse_base(const std::string& text) {
  try {
    const Natural a = parse_natural(text);
    if (a < 2) throw UsageError("base must be at least 2");
    return a;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad base: ") + e.what());
  }
}

/// Writes to --out when given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open " + path + " for writing");
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int run_test(const FormSpec& spec, const std::string& method_in, const std::string& base_text) {
  const ProthForm form = spec.resolve();
  const Natural a = parse_base(base_text);
  std::string method = method_in.empty() ? (form.generalized() ? "gproth" : "pmr") : method_in;
  OpCounter counter;
  TestVerdict v;
  try {
    if (method == "proth") v = proth_classic(form, a, counter);
    else if (method == "gproth") v = generalized_proth(form, a, counter);
    else if (method == "pocklington") v = pocklington(form, a, counter);
    else if (method == "pmr") v = p_miller_rabin(form.N(), form.p(), a, counter);
    else if (method == "complete") v = complete_strong(form.N(), a, counter);
    else throw UsageError("unknown method " + method);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Json j = verdict_to_json(v, form);
  j["products"] = counter.products();
  std::cout << j.dump() << '\n';
  return exit_code(v.outcome);
}

int run_certify(const FormSpec& spec, const std::string& base_text, int algorithm,
                const std::string& out_path, std::size_t retries) {
  const ProthForm form = spec.resolve();
  if (algorithm == 0) algorithm = form.generalized() ? 2 : 1;
  if (algorithm == 2 && !form.generalized())
    throw UsageError("algorithm 2 requires K < p^n; use --algorithm 1");
  std::optional<Natural> first;
  if (!base_text.empty()) first = parse_base(base_text);
  OpCounter counter;
  CertifyResult r;
  try {
    r = certify_with_retries(form, algorithm, first, counter, retries);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Json j = verdict_to_json(r.verdict, form);
  Json tried = Json::array();
  for (const auto& a : r.attempted) tried.push_back(to_decimal(a));
  j["attempted_bases"] = tried;
  j["products"] = counter.products();
  std::cout << j.dump() << '\n';
  if (r.verdict.certificate && !out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw UsageError("cannot open " + out_path + " for writing");
    f << certificate_to_text(*r.verdict.certificate);
  }
  if (r.verdict.outcome == Outcome::probable_prime || r.verdict.outcome == Outcome::inconclusive)
    std::cerr << "genproth: retry cap reached without a decision; bases tried: " << tried.dump()
              << '\n';
  return exit_code(r.verdict.outcome);
}

/// Accepts a key=value certificate, a JSON certificate object, or a JSON
/// verdict record carrying a "certificate" member.
int run_verify(const std::string& path) {
  std::string text;
  if (path.empty() || path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read " + path);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  PrimalityCertificate c;
  try {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      // first line only: `test | verify` may pass a single record
      const auto end = text.find('\n', first);
      const Json j = Json::parse(text.substr(first, end == std::string::npos ? end : end - first));
      if (j.contains("certificate")) c = certificate_from_json(j["certificate"]);
      else if (j.contains("outcome")) throw UsageError("record carries no certificate");
      else c = certificate_from_json(j);
    } else {
      c = certificate_from_text(text);
    }
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  } catch (const RecordError& e) {
    throw UsageError(e.what());
  }
  const bool ok = verify_certificate(c);
  Json j;
  j["N"] = to_decimal(c.N);
  j["valid"] = ok;
  std::cout << j.dump() << '\n';
  return ok ? kExitPrime : kExitComposite;
}

int run_census(const std::string& kind, const std::string& p_text, const std::string& bases,
               std::uint64_t limit, const std::string& out_path, unsigned threads) {
  CensusQuery q;
  if (kind == "pstrong" || kind == "p-strong") {
    q.kind = CensusKind::p_strong;
    q.p = p_text.empty() ? 2 : parse_u64_list(p_text, "p").front();
  } else if (kind == "complete" || kind == "complete-strong") {
    q.kind = CensusKind::complete_strong;
    if (!p_text.empty()) throw UsageError("--p does not apply to --kind complete");
  } else {
    throw UsageError("unknown census kind " + kind);
  }
  q.bases = parse_u64_list(bases, "bases");
  q.limit = limit;
  q.threads = threads;
  CensusResult r;
  try {
    r = enumerate_pseudoprimes(q);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Sink sink(out_path);
  for (const auto& rec : r.records) sink.out() << census_record_to_json(rec).dump() << '\n';
  for (const auto& s : r.skipped) std::cerr << "genproth: skipped " << s << '\n';
  return 0;
}

int run_search(const std::string& K, std::uint64_t p, std::uint64_t n_from, std::uint64_t n_to,
               const std::string& base_text, const std::string& out_path) {
  const Natural a = parse_base(base_text);
  Natural k;
  try {
    k = parse_natural(K);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad K: ") + e.what());
  }
  std::vector<SearchEntry> entries;
  try {
    entries = search_family(k, p, n_from, n_to, a);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  Sink sink(out_path);
  std::uint64_t primes = 0, composites = 0, undecided = 0, errors = 0;
  for (const auto& e : entries) {
    sink.out() << search_entry_to_json(e).dump() << '\n';
    if (!e.error.empty()) ++errors;
    else if (e.verdict->is_prime()) ++primes;
    else if (e.verdict->is_composite()) ++composites;
    else ++undecided;
  }
  Json summary;
  summary["summary"] = {{"tested", entries.size()}, {"primes", primes},
                        {"composites", composites}, {"undecided", undecided}, {"errors", errors}};
  sink.out() << summary.dump() << '\n';
  return 0;
}

int run_bench(const std::string& K, const std::string& p_text, const std::string& n_list,
              const std::string& mode, const std::string& base_text, double weight,
              std::uint64_t digit_cap, bool table) {
  const auto ns = parse_u64_list(n_list, "n-list");
  const auto p = parse_u64_list(p_text, "p").front();
  const Natural a = parse_base(base_text);
  Natural k;
  try {
    k = parse_natural(K);
    make_form(k, p, 1);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<ScheduleMode> modes;
  if (mode == "binary") modes = {ScheduleMode::binary};
  else if (mode == "scheduled") modes = {ScheduleMode::scheduled};
  else if (mode == "both") modes = {ScheduleMode::binary, ScheduleMode::scheduled};
  else throw UsageError("unknown mode " + mode);
  if (weight < 0) throw UsageError("inversion weight must be non-negative");
  const CostModel cost{weight};
  std::vector<OpCountReport> reports;
  try {
    for (auto m : modes) {
      auto part = scaling_run(k, p, ns, a, m, cost, digit_cap);
      reports.insert(reports.end(), part.begin(), part.end());
    }
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (table) {
    std::cout << std::left << std::setw(24) << "form" << std::setw(10) << "mode" << std::right
              << std::setw(8) << "digits" << std::setw(10) << "squares" << std::setw(8) << "mults"
              << std::setw(8) << "invs" << std::setw(12) << "weighted" << std::setw(12) << "seconds"
              << '\n';
    for (const auto& r : reports)
      std::cout << std::left << std::setw(24) << r.form << std::setw(10) << to_string(r.mode)
                << std::right << std::setw(8) << r.digits << std::setw(10) << r.squarings
                << std::setw(8) << r.multiplications << std::setw(8) << r.inversions
                << std::setw(12) << r.weighted_cost << std::setw(12) << std::setprecision(4)
                << r.seconds << '\n';
  } else {
    for (const auto& r : reports) std::cout << report_to_json(r).dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primality tests and certificates for N = K*p^n+1"};
  app.require_subcommand(1);

  FormSpec test_form;
  std::string test_method, test_base = "2";
  auto* test = app.add_subcommand("test", "Run one primality test");
  test_form.add_to(test);
  test->add_option("--method", test_method, "proth|gproth|pocklington|pmr|complete");
  test->add_option("--base", test_base, "Base a");

  FormSpec cert_form;
  std::string cert_base, cert_out;
  int cert_alg = 0;
  std::size_t cert_retries = kDefaultRetryCap;
  auto* certify = app.add_subcommand("certify", "Certify with algorithm 1 or 2, retrying bases");
  cert_form.add_to(certify);
  certify->add_option("--base", cert_base, "First base (default 2, then 3, 5, 7)");
  certify->add_option("--algorithm", cert_alg, "1 or 2")->check(CLI::IsMember({1, 2}));
  certify->add_option("--out", cert_out, "Certificate file written on success");
  certify->add_option("--retries", cert_retries, "Maximum number of bases")->check(CLI::PositiveNumber);

  std::string verify_path;
  auto* verify = app.add_subcommand("verify", "Check a certificate file (or stdin)");
  verify->add_option("certificate", verify_path, "Path, or - for stdin");

  std::string census_kind = "pstrong", census_p, census_bases = "2", census_out;
  std::uint64_t census_limit = 0;
  unsigned census_threads = 0;
  auto* census = app.add_subcommand("census", "Enumerate pseudoprimes below a limit");
  census->add_option("--kind", census_kind, "pstrong|complete");
  census->add_option("--p", census_p, "Prime p for pstrong (default 2)");
  census->add_option("--bases", census_bases, "Comma-separated bases");
  census->add_option("--limit", census_limit, "Exclusive upper bound")->required();
  census->add_option("--out", census_out, "Output path");
  census->add_option("--threads", census_threads, "Worker threads (0 = all cores)");

  std::string search_K, search_base = "2", search_out;
  std::uint64_t search_p = 0, search_from = 1, search_to = 0;
  auto* search = app.add_subcommand("search", "Certify K*p^n+1 over a range of n");
  search->add_option("--K", search_K, "Multiplier K")->required();
  search->add_option("--p", search_p, "Prime p")->required();
  search->add_option("--n-from", search_from, "First n");
  search->add_option("--n-to", search_to, "Last n");
  search->add_option("--base", search_base, "First base");
  search->add_option("--out", search_out, "Output path");

  std::string bench_K = "2", bench_p = "3", bench_n, bench_mode = "both", bench_base = "2";
  double bench_weight = CostModel{}.inversion_weight;
  std::uint64_t bench_cap = kDefaultDigitCap;
  bool bench_table = false;
  auto* bench = app.add_subcommand("bench", "Operation counts for algorithm 2");
  bench->add_option("--K", bench_K, "Multiplier K");
  bench->add_option("--p", bench_p, "Prime p");
  bench->add_option("--n-list", bench_n, "Comma-separated exponents")->required();
  bench->add_option("--mode", bench_mode, "binary|scheduled|both");
  bench->add_option("--base", bench_base, "Base a");
  bench->add_option("--inversion-weight", bench_weight, "Cost of one inversion in products");
  bench->add_option("--digit-cap", bench_cap, "Refuse N with more decimal digits");
  bench->add_flag("--table", bench_table, "Aligned text table instead of JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*test) return run_test(test_form, test_method, test_base);
    if (*certify) return run_certify(cert_form, cert_base, cert_alg, cert_out, cert_retries);
    if (*verify) return run_verify(verify_path);
    if (*census)
      return run_census(census_kind, census_p, census_bases, census_limit, census_out,
                        census_threads);
    if (*search)
      return run_search(search_K, search_p, search_from, search_to, search_base, search_out);
    if (*bench)
      return run_bench(bench_K, bench_p, bench_n, bench_mode, bench_base, bench_weight, bench_cap,
                       bench_table);
  } catch (const UsageError& e) {
    std::cerr << "genproth: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "genproth: invalid form: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResourceError& e) {
    std::cerr << "genproth: " << e.what() << '\n';
    return kExitResource;
  }
  return kExitUsage;
}
