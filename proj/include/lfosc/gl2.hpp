#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lfosc/euler.hpp"
#include "lfosc/series.hpp"

namespace lfosc::gl2 {

/// Exact q-expansion coefficients a(1..N) of a level-1 holomorphic eigenform
/// plus the unitary normalization lambda(n) = a(n)/n^{(k-1)/2}.
struct EigenformSeries {
  int weight = 12;
  std::size_t limit = 0;
  std::vector<BigInt> exact;      // index 0 unused
  std::vector<double> normalized; // index 0 unused
  std::string label;
};

// Exact tau(1..N) from q prod_{n>=1} (1-q^n)^24.
EigenformSeries delta_q_expansion(std::size_t n);

// Degree-2 data with alpha(p) = e^{+-i theta_p}, 2 cos theta_p = lambda(p),
// theta_p in [0, pi], at every prime p <= prime_limit. Requires the Deligne
// bound |lambda(p)| <= 2 + 1e-9; arccos arguments are clamped to [-1, 1].
euler::SatakeData satake_angles(const EigenformSeries& f, std::size_t prime_limit);

// Degree-(j+1) data {alpha^j, alpha^{j-2}, ..., alpha^{-j}} per prime.
euler::SatakeData symmetric_power_data(const EigenformSeries& f, int j,
                                       std::size_t prime_limit);

// Sym^j series assembled from the Satake angles; real, multiplicative.
CoefficientSeries symmetric_power_series(const EigenformSeries& f, int j, std::size_t n);

// Float view of lambda(1..N).
CoefficientSeries normalized_series(const EigenformSeries& f);

// CSV export: header `n,exact,normalized`, exact in decimal, normalized to 17
// significant digits.
void write_csv(const EigenformSeries& f, std::ostream& os);
void write_csv_file(const EigenformSeries& f, const std::filesystem::path& path);

} // namespace lfosc::gl2
