#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <vector>

#include "lfosc/arith.hpp"
#include "lfosc/error.hpp"
#include "lfosc/rng.hpp"
#include "lfosc/series.hpp"

using lfosc::BigInt;
using lfosc::CoefficientSeries;
using lfosc::Rational;
namespace arith = lfosc::arith;

namespace {

// Trial-division mobius, independent of the sieve.
int mobius_naive(std::size_t n) {
  int k = 0;
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    ++k;
  }
  if (n > 1) ++k;
  return (k % 2 == 0) ? 1 : -1;
}

// d_l(n) by enumerating ordered factorizations recursively.
std::uint64_t divisor_naive(int l, std::size_t n) {
  if (l == 1) return 1;
  std::uint64_t total = 0;
  for (std::size_t d = 1; d <= n; ++d)
    if (n % d == 0) total += divisor_naive(l - 1, n / d);
  return total;
}

CoefficientSeries random_exact(std::size_t n, std::uint64_t seed) {
  auto s = CoefficientSeries::exact(n, "rand");
  lfosc::SplitMix64 rng(seed);
  for (std::size_t i = 1; i <= n; ++i)
    s.set(i, Rational(static_cast<long>(rng.next() % 21) - 10, 1 + static_cast<long>(rng.next() % 4)));
  return s;
}

} // namespace

TEST_CASE("linear sieve matches trial division") {
  auto t = arith::build_sieve(10000);
  for (std::size_t n = 1; n <= 10000; ++n) {
    CAPTURE(n);
    CHECK(int(t.mobius[n]) == mobius_naive(n));
    if (n >= 2) {
      std::size_t spf = t.smallest_prime_factor[n];
      CHECK(n % spf == 0);
      for (std::size_t d = 2; d < spf; ++d) CHECK(n % d != 0);
    }
  }
  CHECK(t.primes.front() == 2);
  CHECK(t.primes.back() == 9973);
}

TEST_CASE("divisor_function matches ordered-tuple count") {
  for (int l = 1; l <= 5; ++l) {
    auto d = arith::divisor_function(l, 200);
    for (std::size_t n = 1; n <= 200; ++n) {
      CAPTURE(l);
      CAPTURE(n);
      CHECK(d.exact_value(n) == Rational(BigInt(divisor_naive(l, n))));
    }
  }
}

TEST_CASE("divisor_function fixed values") {
  auto d4 = arith::divisor_function(4, 10);
  auto d5 = arith::divisor_function(5, 10);
  CHECK(d4.exact_value(4) == Rational(10));
  CHECK(d4.exact_value(6) == Rational(16));
  CHECK(d5.exact_value(4) == Rational(15));
  CHECK(d5.exact_value(7) == Rational(5));
}

TEST_CASE("dirichlet convolution is commutative and associative") {
  const std::size_t n = 300;
  auto a = random_exact(n, 11);
  auto b = random_exact(n, 22);
  auto c = random_exact(n, 33);

  auto ab = arith::dirichlet_convolve(a, b);
  auto ba = arith::dirichlet_convolve(b, a);
  auto ab_c = arith::dirichlet_convolve(ab, c);
  auto a_bc = arith::dirichlet_convolve(a, arith::dirichlet_convolve(b, c));
  for (std::size_t i = 1; i <= n; ++i) {
    CHECK(ab.exact_value(i) == ba.exact_value(i));
    CHECK(ab_c.exact_value(i) == a_bc.exact_value(i));
  }
}

TEST_CASE("mobius inversion: (f * 1) * mu = f") {
  const std::size_t n = 500;
  auto t = arith::build_sieve(n);
  auto f = random_exact(n, 44);
  auto one = CoefficientSeries::exact(n, "one");
  auto mu = CoefficientSeries::exact(n, "mu");
  for (std::size_t i = 1; i <= n; ++i) {
    one.set(i, Rational(1));
    mu.set(i, Rational(int(t.mobius[i])));
  }
  auto g = arith::dirichlet_convolve(f, one);
  auto back = arith::dirichlet_convolve(g, mu);
  for (std::size_t i = 1; i <= n; ++i) CHECK(back.exact_value(i) == f.exact_value(i));
}

TEST_CASE("mobius_scaled_convolve inverts against zeta_2s_plus_1") {
  const std::size_t n = 400;
  auto a = random_exact(n, 55);
  auto lam = arith::mobius_scaled_convolve(a);
  auto back = arith::dirichlet_convolve(lam, arith::zeta_2s_plus_1(n));
  for (std::size_t i = 1; i <= n; ++i) CHECK(back.exact_value(i) == a.exact_value(i));
}

TEST_CASE("mobius_scaled_convolve small indices") {
  auto a = CoefficientSeries::exact(8, "a");
  for (std::size_t i = 1; i <= 8; ++i) a.set(i, Rational(static_cast<long>(i * i + 1)));
  auto lam = arith::mobius_scaled_convolve(a);
  // lambda(n) = sum_{d^2 m = n} mu(d)/d * a(m)
  CHECK(lam.exact_value(1) == a.exact_value(1));
  CHECK(lam.exact_value(2) == a.exact_value(2));
  CHECK(lam.exact_value(4) == a.exact_value(4) - a.exact_value(1) / 2);
  CHECK(lam.exact_value(8) == a.exact_value(8) - a.exact_value(2) / 2);
}

TEST_CASE("zeta_2s_plus_1 support is the squares") {
  auto z = arith::zeta_2s_plus_1(100);
  for (std::size_t n = 1; n <= 100; ++n) {
    std::size_t d = 1;
    while (d * d < n) ++d;
    if (d * d == n)
      CHECK(z.exact_value(n) == Rational(1, static_cast<long>(d)));
    else
      CHECK(z.exact_value(n) == Rational(0));
  }
}

TEST_CASE("convolution kind promotion: exact only when both inputs are exact") {
  auto a = CoefficientSeries::exact(10, "a");
  auto b = CoefficientSeries::float64(10, "b");
  for (std::size_t i = 1; i <= 10; ++i) {
    a.set(i, Rational(static_cast<long>(i)));
    b.set(i, 2.0);
  }
  auto mixed = arith::dirichlet_convolve(a, b);
  CHECK(!mixed.is_exact());
  // 6 = 1*6, 2*3, 3*2, 6*1: sum of 2*d over d | 6.
  CHECK(mixed.value(6) == 2.0 * (1 + 2 + 3 + 6));
  auto both = arith::dirichlet_convolve(a, a);
  CHECK(both.is_exact());
  CHECK_THROWS_AS(arith::dirichlet_convolve(a, CoefficientSeries::exact(5, "short")),
                  lfosc::Error);
}

TEST_CASE("splitmix64 reference sequence") {
  // Golden values for seed 1234567.
  lfosc::SplitMix64 rng(1234567);
  std::uint64_t first = rng.next();
  lfosc::SplitMix64 rng2(1234567);
  CHECK(rng2.next() == first);
  double u = rng2.next_unit();
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
  CHECK(lfosc::mix_seed(1, 2) != lfosc::mix_seed(1, 3));
  CHECK(lfosc::mix_seed(1, 2) != lfosc::mix_seed(2, 2));
}
