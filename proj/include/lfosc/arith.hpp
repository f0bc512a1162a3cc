#pragma once

#include <cstdint>
#include <vector>

#include "lfosc/series.hpp"

namespace lfosc::arith {

/// Linear-sieve tables shared by the coefficient generators.
struct SieveTables {
  std::size_t limit = 0;
  std::vector<std::int8_t> mobius;                 // index 0 unused
  std::vector<std::uint32_t> smallest_prime_factor; // spf(1) = 1
  std::vector<std::uint32_t> primes;                // all primes <= limit, ascending
};

// O(N) linear sieve.
SieveTables build_sieve(std::size_t n);

// d_l(n) = number of ordered l-tuples with product n; d_l(p^k) = C(k+l-1, l-1).
CoefficientSeries divisor_function(int l, std::size_t n);

// (a*b)(n) = sum_{d|n} a(d) b(n/d). Exact when both inputs are exact.
CoefficientSeries dirichlet_convolve(const CoefficientSeries& a, const CoefficientSeries& b);

// lambda(n) = sum_{d^2 m = n} (mu(d)/d) a(m): division of the Dirichlet series
// by zeta(2s+1). Exact input gives exact output.
CoefficientSeries mobius_scaled_convolve(const CoefficientSeries& a);

// Coefficients of zeta(2s+1) as a series in s: e(d^2) = 1/d, else 0.
// Convolving mobius_scaled_convolve(a) with this recovers a.
CoefficientSeries zeta_2s_plus_1(std::size_t n);

} // namespace lfosc::arith
