#include "lfosc/arith.hpp"

#include <cmath>

#include "lfosc/error.hpp"

namespace lfosc::arith {

SieveTables build_sieve(std::size_t n) {
  if (n == 0) raise(errc::invalid_argument, "build_sieve: N must be >= 1");
  SieveTables t;
  t.limit = n;
  t.mobius.assign(n + 1, 0);
  t.smallest_prime_factor.assign(n + 1, 0);
  t.mobius[1] = 1;
  t.smallest_prime_factor[1] = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (t.smallest_prime_factor[i] == 0) {
      t.smallest_prime_factor[i] = static_cast<std::uint32_t>(i);
      t.mobius[i] = -1;
      t.primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : t.primes) {
      if (p > t.smallest_prime_factor[i] || i * p > n) break;
      t.smallest_prime_factor[i * p] = p;
      t.mobius[i * p] = (i % p == 0) ? 0 : -t.mobius[i];
    }
  }
  return t;
}

CoefficientSeries divisor_function(int l, std::size_t n) {
  if (l < 1) raise(errc::invalid_argument, "divisor_function: l must be >= 1");
  if (n == 0) raise(errc::invalid_argument, "divisor_function: N must be >= 1");
  SieveTables t = build_sieve(n);
  CoefficientSeries out = CoefficientSeries::exact(n, "d_" + std::to_string(l));
  out.set_multiplicative(true);

  // C(k+l-1, l-1) for the prime-power exponents that occur below N.
  int max_k = 1;
  while ((std::size_t{1} << (max_k + 1)) <= n) ++max_k;
  std::vector<BigInt> binom(max_k + 1);
  for (int k = 0; k <= max_k; ++k) {
    BigInt b = 1;
    for (int i = 1; i < l; ++i) b = b * (k + i) / i;
    binom[k] = b;
  }

  std::vector<BigInt> vals(n + 1);
  vals[1] = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    std::uint32_t p = t.smallest_prime_factor[i];
    std::size_t m = i;
    int k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    vals[i] = vals[m] * binom[k];
  }
  for (std::size_t i = 1; i <= n; ++i) out.set(i, Rational(vals[i]));
  return out;
}

CoefficientSeries dirichlet_convolve(const CoefficientSeries& a, const CoefficientSeries& b) {
  if (a.limit() != b.limit())
    raise(errc::invalid_argument, "dirichlet_convolve: limit mismatch (" +
                                      std::to_string(a.limit()) + " vs " +
                                      std::to_string(b.limit()) + ")");
  const std::size_t n = a.limit();
  const bool exact = a.is_exact() && b.is_exact();
  CoefficientSeries out(exact ? ValueKind::Exact : ValueKind::Float64, n,
                        "(" + a.label() + ")*(" + b.label() + ")");
  out.set_multiplicative(a.is_multiplicative() && b.is_multiplicative());

  if (exact) {
    std::vector<Rational> acc(n + 1, Rational(0));
    for (std::size_t d = 1; d <= n; ++d) {
      const Rational& ad = a.exact_value(d);
      if (ad.is_zero()) continue;
      for (std::size_t e = 1; d * e <= n; ++e) {
        const Rational& be = b.exact_value(e);
        if (be.is_zero()) continue;
        acc[d * e] += ad * be;
      }
    }
    for (std::size_t i = 1; i <= n; ++i) out.set(i, std::move(acc[i]));
  } else {
    std::vector<double> acc(n + 1, 0.0);
    for (std::size_t d = 1; d <= n; ++d) {
      const double ad = a.value(d);
      if (ad == 0.0) continue;
      for (std::size_t e = 1; d * e <= n; ++e) acc[d * e] += ad * b.value(e);
    }
    for (std::size_t i = 1; i <= n; ++i) out.set(i, acc[i]);
  }
  return out;
}

CoefficientSeries mobius_scaled_convolve(const CoefficientSeries& a) {
  const std::size_t n = a.limit();
  const std::size_t droot = static_cast<std::size_t>(std::sqrt(static_cast<double>(n))) + 1;
  SieveTables t = build_sieve(droot);

  CoefficientSeries out(a.kind(), n, "mobius-scaled(" + a.label() + ")");
  out.set_multiplicative(a.is_multiplicative());
  if (a.is_exact()) {
    std::vector<Rational> acc(n + 1, Rational(0));
    for (std::size_t d = 1; d * d <= n; ++d) {
      if (t.mobius[d] == 0) continue;
      Rational w(t.mobius[d], static_cast<long>(d));
      for (std::size_t m = 1; d * d * m <= n; ++m) acc[d * d * m] += w * a.exact_value(m);
    }
    for (std::size_t i = 1; i <= n; ++i) out.set(i, std::move(acc[i]));
  } else {
    std::vector<double> acc(n + 1, 0.0);
    for (std::size_t d = 1; d * d <= n; ++d) {
      if (t.mobius[d] == 0) continue;
      double w = static_cast<double>(t.mobius[d]) / static_cast<double>(d);
      for (std::size_t m = 1; d * d * m <= n; ++m) acc[d * d * m] += w * a.value(m);
    }
    for (std::size_t i = 1; i <= n; ++i) out.set(i, acc[i]);
  }
  return out;
}

CoefficientSeries zeta_2s_plus_1(std::size_t n) {
  CoefficientSeries out = CoefficientSeries::exact(n, "zeta(2s+1)");
  out.set_multiplicative(true);
  for (std::size_t d = 1; d * d <= n; ++d) out.set(d * d, Rational(1, static_cast<long>(d)));
  return out;
}

} // namespace lfosc::arith
