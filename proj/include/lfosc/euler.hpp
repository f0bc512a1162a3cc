#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lfosc/series.hpp"

namespace lfosc::euler {

using Complex = std::complex<double>;

// Absolute tolerance for unitarity / product / realness checks.
inline constexpr double kTolerance = 1e-9;

enum class SynthModel { RamanujanUniform, SatoTate, LrsExtremal };

const char* to_string(SynthModel model);
std::optional<SynthModel> parse_model(std::string_view name);

/// Local parameters {alpha_1..alpha_m}(p) of a degree-m Euler product at each
/// stored prime, with the declared bound |alpha_i(p)| <= p^theta.
struct SatakeData {
  int degree = 0;
  std::int64_t conductor = 1;
  double ramanujan_exponent = 0.0; // theta
  bool lrs_compliant = false;      // theta <= 1/2 - 1/(degree^2 + 1)
  std::string model = "explicit";
  std::uint64_t seed = 0;
  // Ascending by prime.
  std::vector<std::pair<std::uint32_t, std::vector<Complex>>> per_prime;

  const std::vector<Complex>* find(std::uint32_t p) const;
};

// Checks the stored invariants; throws on violation.
void validate(const SatakeData& data);

// Coefficients c_0..c_K of prod_i (1 - alpha_i X)^{-1}, so a(p^k) = c_k.
// Computed by the recurrence against prod_i (1 - alpha_i X).
std::vector<Complex> expand_local_factor(std::span<const Complex> alphas, int k_max);

// Multiplicative global series with a(p^k) = expand_local_factor(alpha(p), k)[k].
// Requires parameters at every prime <= n; requires the resulting coefficients
// to be real to relative tolerance kTolerance (conjugate-closed local data).
CoefficientSeries assemble_series(const SatakeData& data, std::size_t n);

// Satake parameters of the convolution: the m*m' pairwise products. The caller
// supplies the second factor's parameters explicitly (for pi x pi~ with
// unitary data that is the conjugate list).
std::vector<Complex> rankin_selberg_local(std::span<const Complex> a, std::span<const Complex> b);

// {alpha^j, alpha^{j-2}, ..., alpha^{-j}} for a unitary-normalized GL2 pair
// {alpha, beta} with alpha*beta = 1.
std::vector<Complex> symmetric_power_local(std::span<const Complex> alphas, int j);

// Deterministic synthetic data covering all primes <= n.
//   ramanujan-uniform: unit-circle parameters in conjugate pairs
//   sato-tate:         m = 2 only, theta_p with density (2/pi) sin^2(theta)
//   lrs-extremal:      conjugate pairs of modulus p^{1/2 - 1/(m^2+1)}
SatakeData synth_satake(int m, std::size_t n, SynthModel model, std::uint64_t seed);

// Conjugate parameter list at every prime (the contragredient of unitary data).
SatakeData contragredient(const SatakeData& data);

// Pairwise-product data for the convolution; degree m * m'.
SatakeData rankin_selberg_data(const SatakeData& a, const SatakeData& b);

// Line-oriented text format:
//   degree=m conductor=Q model=<name> seed=<s>
//   p alpha_1.re alpha_1.im ... alpha_m.re alpha_m.im
void write_satake(const SatakeData& data, std::ostream& os);
SatakeData read_satake(std::istream& is);
void write_satake_file(const SatakeData& data, const std::filesystem::path& path);
SatakeData read_satake_file(const std::filesystem::path& path);

} // namespace lfosc::euler
