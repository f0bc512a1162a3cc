#include "lfosc/siegel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lfosc/arith.hpp"
#include "lfosc/error.hpp"
#include "lfosc/rng.hpp"

namespace lfosc::siegel {

std::vector<euler::Complex> beta_parameters(const LocalTriple& t) {
  return {t.alpha0, t.alpha0 * t.alpha1, t.alpha0 * t.alpha2,
          t.alpha0 * t.alpha1 * t.alpha2};
}

std::vector<LocalTriple> synth_triples(std::size_t n, std::uint64_t seed) {
  constexpr double pi = 3.14159265358979323846;
  arith::SieveTables sieve = arith::build_sieve(std::max<std::size_t>(n, 2));
  std::vector<LocalTriple> triples;
  triples.reserve(sieve.primes.size());
  for (std::uint32_t p : sieve.primes) {
    if (p > n) break;
    SplitMix64 rng(mix_seed(seed, p));
    // beta pairs (beta1, beta4) = e^{+-i t1} and (beta2, beta3) = e^{+-i t2}
    double t1 = pi * rng.next_unit();
    double t2 = pi * rng.next_unit();
    LocalTriple t;
    t.p = p;
    t.alpha0 = std::polar(1.0, t1);
    t.alpha1 = std::polar(1.0, t2 - t1);
    t.alpha2 = std::polar(1.0, -(t2 + t1));
    triples.push_back(t);
  }
  return triples;
}

CoefficientSeries spinor_series(const std::vector<LocalTriple>& triples, std::size_t n) {
  euler::SatakeData data;
  data.degree = 4;
  data.model = "spinor";
  data.per_prime.reserve(triples.size());
  for (const LocalTriple& t : triples)
    data.per_prime.emplace_back(t.p, beta_parameters(t));
  std::sort(data.per_prime.begin(), data.per_prime.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return euler::assemble_series(data, n);
}

CoefficientSeries normalized_eigenvalues(const CoefficientSeries& a_f) {
  CoefficientSeries out = arith::mobius_scaled_convolve(a_f);
  out.set_label(a_f.label() + "-normalized");
  return out;
}

CoefficientSeries SiegelEigenData::raw_series() const {
  CoefficientSeries out = CoefficientSeries::float64(limit, source);
  for (std::size_t i = 1; i <= limit; ++i) {
    if (present[i])
      out.set(i, lambda_f[i]);
    else
      out.mark_absent(i);
  }
  return out;
}

CoefficientSeries SiegelEigenData::normalized_series() const {
  CoefficientSeries out = CoefficientSeries::float64(limit, source + "-normalized");
  double exponent = weight - 1.5;
  for (std::size_t i = 1; i <= limit; ++i) {
    if (present[i])
      out.set(i, lambda_f[i] / std::pow(static_cast<double>(i), exponent));
    else
      out.mark_absent(i);
  }
  return out;
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t lineno,
                             const std::string& what) {
  raise(errc::parse_error,
        path.string() + ":" + std::to_string(lineno) + ": " + what);
}

} // namespace

SiegelEigenData ingest_eigenvalues(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) raise(errc::io_error, "cannot open " + path.string());

  SiegelEigenData data;
  data.source = "ingested:" + path.string();
  bool got_weight = false;
  std::vector<std::pair<std::size_t, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      std::size_t body = line.find_first_not_of(" \t", start + 1);
      if (body != std::string::npos && line.compare(body, 7, "weight=") == 0) {
        std::istringstream ws(line.substr(body + 7));
        int k;
        if (!(ws >> k) || k < 2) parse_fail(path, lineno, "invalid weight header");
        data.weight = k;
        got_weight = true;
      }
      continue;
    }
    std::istringstream ls(line);
    long long n;
    if (!(ls >> n) || n < 1) parse_fail(path, lineno, "expected a positive index");
    double re, im = 0.0;
    if (!(ls >> re)) parse_fail(path, lineno, "expected a numeric value");
    bool has_im = static_cast<bool>(ls >> im);
    double extra;
    if (ls >> extra) parse_fail(path, lineno, "trailing values");
    if (!std::isfinite(re) || (has_im && im != 0.0))
      raise(errc::data_error, path.string() + ":" + std::to_string(lineno) +
                                  ": eigenvalue must be real and finite");
    rows.emplace_back(static_cast<std::size_t>(n), re);
  }
  if (!got_weight)
    raise(errc::parse_error, path.string() + ": missing `# weight=k` header");
  if (rows.empty()) raise(errc::parse_error, path.string() + ": no eigenvalue rows");

  data.limit = 0;
  for (const auto& [n, v] : rows) data.limit = std::max(data.limit, n);
  data.lambda_f.assign(data.limit + 1, 0.0);
  data.present.assign(data.limit + 1, 0);
  for (const auto& [n, v] : rows) {
    if (data.present[n])
      raise(errc::parse_error, path.string() + ": duplicate index " + std::to_string(n));
    data.lambda_f[n] = v;
    data.present[n] = 1;
  }
  if (data.present[1] && std::abs(data.lambda_f[1] - 1.0) > 1e-12)
    raise(errc::data_error, path.string() + ": lambda_F(1) must equal 1");
  return data;
}

SiegelEigenData ingest_eigenvalues(const std::filesystem::path& path, int expected_weight) {
  SiegelEigenData data = ingest_eigenvalues(path);
  if (data.weight != expected_weight)
    raise(errc::data_error, path.string() + ": header weight " +
                                std::to_string(data.weight) + " does not match expected " +
                                std::to_string(expected_weight));
  return data;
}

} // namespace lfosc::siegel
