#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfosc/euler.hpp"
#include "lfosc/series.hpp"

namespace lfosc::siegel {

/// Satake triple (alpha0, alpha1, alpha2) of a genus-2 eigenform at p.
struct LocalTriple {
  std::uint32_t p = 0;
  euler::Complex alpha0{1.0}, alpha1{1.0}, alpha2{1.0};
};

// Spinor parameters {alpha0, alpha0 a1, alpha0 a2, alpha0 a1 a2}, in that order.
std::vector<euler::Complex> beta_parameters(const LocalTriple& t);

// Deterministic unitary triples at every prime <= n. Drawn so the beta
// multiset is conjugate-closed (spinor coefficients come out real); that
// forces alpha0^2 alpha1 alpha2 = 1 as a byproduct.
std::vector<LocalTriple> synth_triples(std::size_t n, std::uint64_t seed);

// a_F(n) assembled from the degree-4 beta Euler product. Triples must cover
// every prime <= n.
CoefficientSeries spinor_series(const std::vector<LocalTriple>& triples, std::size_t n);

// lambda(n) = sum_{d^2 m = n} (mu(d)/d) a_F(m): division by zeta(2s+1).
CoefficientSeries normalized_eigenvalues(const CoefficientSeries& a_f);

/// Raw Hecke eigenvalues lambda_F(1..N) of a weight-k eigenform, possibly with
/// holes (absent indices), plus the normalized view lambda_F(n)/n^{k-3/2}.
struct SiegelEigenData {
  int weight = 0;
  std::size_t limit = 0;
  std::vector<double> lambda_f;       // index 0 unused
  std::vector<std::uint8_t> present;  // parallel to lambda_f
  std::string source;

  CoefficientSeries raw_series() const;
  CoefficientSeries normalized_series() const;
};

// Parses an eigenvalue file: `#` comments, a mandatory `# weight=k` header,
// then `n value` lines. Absent indices are recorded as gaps. The second
// overload additionally checks the header weight against the caller's.
SiegelEigenData ingest_eigenvalues(const std::filesystem::path& path);
SiegelEigenData ingest_eigenvalues(const std::filesystem::path& path, int expected_weight);

} // namespace lfosc::siegel
