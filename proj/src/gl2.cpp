#include "lfosc/gl2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <utility>

#include "lfosc/arith.hpp"
#include "lfosc/error.hpp"

namespace lfosc::gl2 {

namespace {

using Int128 = __int128;

// Sparse expansion of prod (1-q^n)^3 = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}
// (Jacobi), truncated at degree n. O(sqrt(n)) terms.
std::vector<std::pair<std::size_t, std::int64_t>> eta_cubed_terms(std::size_t n) {
  std::vector<std::pair<std::size_t, std::int64_t>> terms;
  for (std::uint64_t k = 0;; ++k) {
    std::uint64_t e = k * (k + 1) / 2;
    if (e > n) break;
    auto c = static_cast<std::int64_t>(2 * k + 1);
    terms.emplace_back(e, k % 2 == 0 ? c : -c);
  }
  return terms;
}

template <class T>
void multiply_by_eta_cubed(std::vector<T>& dense, std::vector<T>& scratch,
                           const std::vector<std::pair<std::size_t, std::int64_t>>& terms,
                           std::size_t n) {
  std::fill(scratch.begin(), scratch.end(), T(0));
  for (const auto& [e, c] : terms) {
    const T* src = dense.data();
    T* dst = scratch.data() + e;
    std::size_t len = n + 1 - e;
    if (c == 1)
      for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
    else if (c == -1)
      for (std::size_t i = 0; i < len; ++i) dst[i] -= src[i];
    else
      for (std::size_t i = 0; i < len; ++i) dst[i] += T(c) * src[i];
  }
  dense.swap(scratch);
}

Int128 max_abs(const std::vector<Int128>& v) {
  Int128 m = 0;
  for (Int128 x : v) {
    if (x < 0) x = -x;
    if (x > m) m = x;
  }
  return m;
}

} // namespace

EigenformSeries delta_q_expansion(std::size_t n) {
  if (n == 0) raise(errc::invalid_argument, "delta_q_expansion: N must be >= 1");

  auto terms = eta_cubed_terms(n);
  std::int64_t sum_abs = 0;
  for (const auto& [e, c] : terms) sum_abs += std::abs(c);

  // Accumulate (1-q^n)^{3k} for k = 1..8 in 128-bit; each pass grows the max
  // coefficient by at most a factor sum_abs, checked before the pass. tau
  // coefficients peak near n^{6} so the guard never fires for n <= ~10^7.
  std::vector<Int128> dense(n + 1, 0), scratch(n + 1);
  for (const auto& [e, c] : terms) dense[e] = c;
  const Int128 cap = std::numeric_limits<Int128>::max() / Int128(sum_abs);

  std::vector<BigInt> wide;
  int pass = 0;
  for (; pass < 7; ++pass) {
    if (max_abs(dense) > cap) break;
    multiply_by_eta_cubed(dense, scratch, terms, n);
  }
  if (pass < 7) {
    wide.assign(dense.begin(), dense.end());
    std::vector<BigInt> wide_scratch(n + 1);
    for (; pass < 7; ++pass) multiply_by_eta_cubed(wide, wide_scratch, terms, n);
  }

  EigenformSeries f;
  f.weight = 12;
  f.limit = n;
  f.label = "delta";
  f.exact.resize(n + 1);
  f.normalized.resize(n + 1);
  // tau(i) is the q^{i-1} coefficient of prod (1-q^n)^24.
  for (std::size_t i = 1; i <= n; ++i)
    f.exact[i] = wide.empty() ? BigInt(dense[i - 1]) : wide[i - 1];
  for (std::size_t i = 1; i <= n; ++i)
    f.normalized[i] =
        f.exact[i].convert_to<double>() / std::pow(static_cast<double>(i), 5.5);
  return f;
}

euler::SatakeData satake_angles(const EigenformSeries& f, std::size_t prime_limit) {
  if (prime_limit > f.limit)
    raise(errc::invalid_argument, "satake_angles: prime bound exceeds series limit");
  euler::SatakeData data;
  data.degree = 2;
  data.model = f.label;
  data.lrs_compliant = true;
  arith::SieveTables sieve = arith::build_sieve(std::max<std::size_t>(prime_limit, 1));
  for (std::uint32_t p : sieve.primes) {
    double lambda = f.normalized[p];
    if (std::abs(lambda) > 2.0 + euler::kTolerance)
      raise(errc::data_error, "satake_angles: |lambda(" + std::to_string(p) +
                                  ")| exceeds the Deligne bound 2");
    double theta = std::acos(std::clamp(lambda / 2.0, -1.0, 1.0));
    data.per_prime.emplace_back(
        p, std::vector<euler::Complex>{std::polar(1.0, theta), std::polar(1.0, -theta)});
  }
  return data;
}

euler::SatakeData symmetric_power_data(const EigenformSeries& f, int j,
                                       std::size_t prime_limit) {
  if (j < 1) raise(errc::invalid_argument, "symmetric_power_data: j must be >= 1");
  euler::SatakeData base = satake_angles(f, prime_limit);
  euler::SatakeData sym;
  sym.degree = j + 1;
  sym.model = "sym" + std::to_string(j) + "-" + f.label;
  sym.lrs_compliant = true;
  sym.per_prime.reserve(base.per_prime.size());
  for (const auto& [p, alphas] : base.per_prime)
    sym.per_prime.emplace_back(p, euler::symmetric_power_local(alphas, j));
  return sym;
}

CoefficientSeries symmetric_power_series(const EigenformSeries& f, int j, std::size_t n) {
  return euler::assemble_series(symmetric_power_data(f, j, n), n);
}

CoefficientSeries normalized_series(const EigenformSeries& f) {
  CoefficientSeries out = CoefficientSeries::float64(f.limit, f.label + "-normalized");
  out.set_multiplicative(true);
  for (std::size_t i = 1; i <= f.limit; ++i) out.set(i, f.normalized[i]);
  return out;
}

void write_csv(const EigenformSeries& f, std::ostream& os) {
  os << "n,exact,normalized\n";
  char buf[64];
  for (std::size_t i = 1; i <= f.limit; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", f.normalized[i]);
    os << i << ',' << f.exact[i] << ',' << buf << '\n';
  }
}

void write_csv_file(const EigenformSeries& f, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) raise(errc::io_error, "cannot open " + path.string() + " for writing");
  write_csv(f, os);
  if (!os) raise(errc::io_error, "write failed: " + path.string());
}

} // namespace lfosc::gl2
