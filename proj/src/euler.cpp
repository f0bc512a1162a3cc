#include "lfosc/euler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lfosc/arith.hpp"
#include "lfosc/error.hpp"
#include "lfosc/rng.hpp"

namespace lfosc::euler {

const char* to_string(SynthModel model) {
  switch (model) {
    case SynthModel::RamanujanUniform: return "ramanujan-uniform";
    case SynthModel::SatoTate: return "sato-tate";
    case SynthModel::LrsExtremal: return "lrs-extremal";
  }
  return "?";
}

std::optional<SynthModel> parse_model(std::string_view name) {
  if (name == "ramanujan-uniform") return SynthModel::RamanujanUniform;
  if (name == "sato-tate") return SynthModel::SatoTate;
  if (name == "lrs-extremal") return SynthModel::LrsExtremal;
  return std::nullopt;
}

const std::vector<Complex>* SatakeData::find(std::uint32_t p) const {
  auto it = std::lower_bound(per_prime.begin(), per_prime.end(), p,
                             [](const auto& e, std::uint32_t v) { return e.first < v; });
  if (it == per_prime.end() || it->first != p) return nullptr;
  return &it->second;
}

void validate(const SatakeData& data) {
  if (data.degree < 1) raise(errc::invalid_argument, "SatakeData: degree must be >= 1");
  if (data.conductor < 1) raise(errc::invalid_argument, "SatakeData: conductor must be >= 1");
  double lrs_bound = 0.5 - 1.0 / (static_cast<double>(data.degree) * data.degree + 1.0);
  if (data.lrs_compliant && data.ramanujan_exponent > lrs_bound + kTolerance)
    raise(errc::data_error, "SatakeData: declared exponent exceeds the LRS bound");
  std::uint32_t prev = 0;
  for (const auto& [p, alphas] : data.per_prime) {
    if (p <= prev) raise(errc::data_error, "SatakeData: primes not strictly ascending");
    prev = p;
    if (static_cast<int>(alphas.size()) != data.degree)
      raise(errc::data_error, "SatakeData: prime " + std::to_string(p) + " has " +
                                  std::to_string(alphas.size()) + " parameters, expected " +
                                  std::to_string(data.degree));
    double bound = std::pow(static_cast<double>(p), data.ramanujan_exponent);
    for (const Complex& a : alphas)
      if (std::abs(a) > bound + kTolerance)
        raise(errc::data_error,
              "SatakeData: |alpha| exceeds p^theta at p = " + std::to_string(p));
  }
}

std::vector<Complex> expand_local_factor(std::span<const Complex> alphas, int k_max) {
  if (k_max < 0) raise(errc::invalid_argument, "expand_local_factor: K must be >= 0");
  const int m = static_cast<int>(alphas.size());
  // q(X) = prod_i (1 - alpha_i X), degree m.
  std::vector<Complex> q(m + 1, Complex(0.0));
  q[0] = 1.0;
  for (int i = 0; i < m; ++i)
    for (int d = i + 1; d >= 1; --d) q[d] -= alphas[i] * q[d - 1];

  std::vector<Complex> c(k_max + 1);
  c[0] = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    Complex s = 0.0;
    for (int j = 1; j <= std::min(m, k); ++j) s += q[j] * c[k - j];
    c[k] = -s;
  }
  return c;
}

CoefficientSeries assemble_series(const SatakeData& data, std::size_t n) {
  if (n == 0) raise(errc::invalid_argument, "assemble_series: N must be >= 1");
  arith::SieveTables sieve = arith::build_sieve(n);

  // Local expansions a(p^k) for k <= floor(log N / log p).
  std::vector<std::vector<Complex>> locals(sieve.primes.size());
  std::vector<std::int32_t> prime_index(n + 1, -1);
  for (std::size_t i = 0; i < sieve.primes.size(); ++i) {
    std::uint32_t p = sieve.primes[i];
    const std::vector<Complex>* alphas = data.find(p);
    if (!alphas)
      raise(errc::precondition,
            "assemble_series: no Satake parameters stored for prime " + std::to_string(p));
    if (static_cast<int>(alphas->size()) != data.degree)
      raise(errc::data_error, "assemble_series: degree mismatch at prime " + std::to_string(p));
    int k_max = 0;
    for (std::size_t q = p; q <= n; q *= p) ++k_max;
    locals[i] = expand_local_factor(*alphas, k_max);
    prime_index[p] = static_cast<std::int32_t>(i);
  }

  std::vector<Complex> vals(n + 1);
  vals[1] = 1.0;
  for (std::size_t i = 2; i <= n; ++i) {
    std::uint32_t p = sieve.smallest_prime_factor[i];
    std::size_t m = i;
    int k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    vals[i] = locals[prime_index[p]][k] * vals[m];
  }

  CoefficientSeries out = CoefficientSeries::float64(n, data.model + "-series");
  out.set_multiplicative(true);
  for (std::size_t i = 1; i <= n; ++i) {
    if (std::abs(vals[i].imag()) > kTolerance * std::max(1.0, std::abs(vals[i].real())))
      raise(errc::data_error, "assemble_series: non-real coefficient at n = " +
                                  std::to_string(i) +
                                  " (local data not conjugate-closed)");
    out.set(i, vals[i].real());
  }
  return out;
}

std::vector<Complex> rankin_selberg_local(std::span<const Complex> a, std::span<const Complex> b) {
  std::vector<Complex> out;
  out.reserve(a.size() * b.size());
  for (const Complex& x : a)
    for (const Complex& y : b) out.push_back(x * y);
  return out;
}

std::vector<Complex> symmetric_power_local(std::span<const Complex> alphas, int j) {
  if (alphas.size() != 2)
    raise(errc::invalid_argument, "symmetric_power_local: expected 2 parameters");
  if (j < 1) raise(errc::invalid_argument, "symmetric_power_local: j must be >= 1");
  const Complex alpha = alphas[0], beta = alphas[1];
  if (std::abs(alpha * beta - 1.0) > kTolerance)
    raise(errc::invalid_argument,
          "symmetric_power_local: parameters do not multiply to 1");
  std::vector<Complex> pa(j + 1), pb(j + 1);
  pa[0] = pb[0] = 1.0;
  for (int t = 1; t <= j; ++t) {
    pa[t] = pa[t - 1] * alpha;
    pb[t] = pb[t - 1] * beta;
  }
  std::vector<Complex> out(j + 1);
  for (int t = 0; t <= j; ++t) out[t] = pa[j - t] * pb[t]; // alpha^{j-2t}
  return out;
}

SatakeData synth_satake(int m, std::size_t n, SynthModel model, std::uint64_t seed) {
  if (m < 2) raise(errc::invalid_argument, "synth_satake: m must be >= 2");
  if (model == SynthModel::SatoTate && m != 2)
    raise(errc::invalid_argument, "synth_satake: sato-tate model requires m = 2");
  if (n == 0) raise(errc::invalid_argument, "synth_satake: N must be >= 1");

  SatakeData data;
  data.degree = m;
  data.model = to_string(model);
  data.seed = seed;
  const double md = static_cast<double>(m);
  data.ramanujan_exponent =
      model == SynthModel::LrsExtremal ? 0.5 - 1.0 / (md * md + 1.0) : 0.0;
  data.lrs_compliant = true;

  constexpr double pi = 3.14159265358979323846;
  arith::SieveTables sieve = arith::build_sieve(std::max<std::size_t>(n, 2));
  for (std::uint32_t p : sieve.primes) {
    if (p > n) break;
    SplitMix64 rng(mix_seed(seed, p));
    double radius =
        model == SynthModel::LrsExtremal ? std::pow(p, data.ramanujan_exponent) : 1.0;
    std::vector<Complex> alphas;
    alphas.reserve(m);
    for (int t = 0; t + 1 < m; t += 2) {
      double theta;
      if (model == SynthModel::SatoTate) {
        // density (2/pi) sin^2(theta) on [0, pi], by rejection
        for (;;) {
          theta = pi * rng.next_unit();
          double s = std::sin(theta);
          if (rng.next_unit() <= s * s) break;
        }
      } else {
        theta = pi * rng.next_unit();
      }
      alphas.push_back(std::polar(radius, theta));
      alphas.push_back(std::polar(radius, -theta));
    }
    if (m % 2 == 1) alphas.push_back(Complex(rng.next_unit() < 0.5 ? radius : -radius, 0.0));
    data.per_prime.emplace_back(p, std::move(alphas));
  }
  return data;
}

SatakeData contragredient(const SatakeData& data) {
  SatakeData out = data;
  out.model = "dual-" + data.model;
  for (auto& [p, alphas] : out.per_prime)
    for (Complex& a : alphas) a = std::conj(a);
  return out;
}

SatakeData rankin_selberg_data(const SatakeData& a, const SatakeData& b) {
  SatakeData out;
  out.degree = a.degree * b.degree;
  out.conductor = a.conductor * b.conductor;
  out.ramanujan_exponent = a.ramanujan_exponent + b.ramanujan_exponent;
  double d = static_cast<double>(out.degree);
  out.lrs_compliant = out.ramanujan_exponent <= 0.5 - 1.0 / (d * d + 1.0) + kTolerance;
  out.model = "rankin-selberg";
  out.seed = a.seed;
  out.per_prime.reserve(a.per_prime.size());
  for (const auto& [p, alphas] : a.per_prime) {
    const std::vector<Complex>* betas = b.find(p);
    if (!betas)
      raise(errc::precondition,
            "rankin_selberg_data: second factor missing prime " + std::to_string(p));
    out.per_prime.emplace_back(p, rankin_selberg_local(alphas, *betas));
  }
  return out;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

void write_satake(const SatakeData& data, std::ostream& os) {
  os << "degree=" << data.degree << " conductor=" << data.conductor << " model=" << data.model
     << " seed=" << data.seed << "\n";
  for (const auto& [p, alphas] : data.per_prime) {
    os << p;
    for (const Complex& a : alphas)
      os << ' ' << fmt_double(a.real()) << ' ' << fmt_double(a.imag());
    os << '\n';
  }
}

SatakeData read_satake(std::istream& is) {
  SatakeData data;
  std::string line;
  if (!std::getline(is, line)) raise(errc::parse_error, "satake data: empty input");
  {
    std::istringstream hs(line);
    std::string tok;
    bool got_degree = false;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        raise(errc::parse_error, "satake data line 1: bad header token '" + tok + "'");
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      try {
        if (key == "degree") {
          data.degree = std::stoi(val);
          got_degree = true;
        } else if (key == "conductor")
          data.conductor = std::stoll(val);
        else if (key == "model")
          data.model = val;
        else if (key == "seed")
          data.seed = std::stoull(val);
        else
          raise(errc::parse_error, "satake data line 1: unknown header key '" + key + "'");
      } catch (const std::invalid_argument&) {
        raise(errc::parse_error, "satake data line 1: bad value for '" + key + "'");
      } catch (const std::out_of_range&) {
        raise(errc::parse_error, "satake data line 1: value out of range for '" + key + "'");
      }
    }
    if (!got_degree || data.degree < 1)
      raise(errc::parse_error, "satake data line 1: missing or invalid degree");
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::uint64_t p;
    if (!(ls >> p) || p < 2)
      raise(errc::parse_error,
            "satake data line " + std::to_string(lineno) + ": expected a prime");
    std::vector<Complex> alphas(data.degree);
    for (int i = 0; i < data.degree; ++i) {
      double re, im;
      if (!(ls >> re >> im))
        raise(errc::parse_error, "satake data line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(2 * data.degree) + " floats");
      alphas[i] = Complex(re, im);
    }
    double extra;
    if (ls >> extra)
      raise(errc::parse_error,
            "satake data line " + std::to_string(lineno) + ": trailing values");
    data.per_prime.emplace_back(static_cast<std::uint32_t>(p), std::move(alphas));
  }
  std::sort(data.per_prime.begin(), data.per_prime.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  // The declared bound of explicit data is the observed one.
  double theta = 0.0;
  for (const auto& [p, alphas] : data.per_prime)
    for (const Complex& a : alphas) {
      double mod = std::abs(a);
      if (mod > 1.0) theta = std::max(theta, std::log(mod) / std::log(double(p)));
    }
  data.ramanujan_exponent = theta;
  double d = data.degree;
  data.lrs_compliant = theta <= 0.5 - 1.0 / (d * d + 1.0) + kTolerance;
  return data;
}

void write_satake_file(const SatakeData& data, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) raise(errc::io_error, "cannot open " + path.string() + " for writing");
  write_satake(data, os);
  if (!os) raise(errc::io_error, "write failed: " + path.string());
}

SatakeData read_satake_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) raise(errc::io_error, "cannot open " + path.string());
  return read_satake(is);
}

} // namespace lfosc::euler
