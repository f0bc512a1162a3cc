#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "lfosc/arith.hpp"
#include "lfosc/error.hpp"
#include "lfosc/euler.hpp"

using lfosc::Error;
using lfosc::errc;
namespace euler = lfosc::euler;
using euler::Complex;
using euler::SynthModel;

namespace {

// Direct power-series product of m geometric series, coefficient K.
std::vector<Complex> geometric_product(const std::vector<Complex>& alphas, int k_max) {
  std::vector<Complex> acc(k_max + 1, 0.0);
  acc[0] = 1.0;
  for (const Complex& a : alphas) {
    std::vector<Complex> next(k_max + 1, 0.0);
    Complex pow = 1.0;
    for (int k = 0; k <= k_max; ++k) {
      for (int j = k; j <= k_max; ++j) next[j] += acc[j - k] * pow;
      pow *= a;
    }
    acc = std::move(next);
  }
  return acc;
}

bool close(Complex a, Complex b, double tol = 1e-10) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("expand_local_factor matches geometric product") {
  std::vector<std::vector<Complex>> cases = {
      {Complex(0.5, 0.25)},
      {Complex(0.3, 0.4), Complex(0.3, -0.4)},
      {Complex(0.9, 0.0), Complex(-0.2, 0.7), Complex(-0.2, -0.7)},
      {Complex(0.1, 0.2), Complex(0.1, -0.2), Complex(-0.6, 0.0), Complex(0.8, 0.0)},
  };
  for (const auto& alphas : cases) {
    auto got = euler::expand_local_factor(alphas, 10);
    auto want = geometric_product(alphas, 10);
    REQUIRE(got.size() == 11);
    for (int k = 0; k <= 10; ++k) {
      CAPTURE(alphas.size());
      CAPTURE(k);
      CHECK(close(got[k], want[k]));
    }
  }
}

TEST_CASE("degree-2 unitary local factor: a(p^k) = sin((k+1)t)/sin(t)") {
  const double t = 1.1;
  std::vector<Complex> alphas = {std::polar(1.0, t), std::polar(1.0, -t)};
  auto c = euler::expand_local_factor(alphas, 8);
  for (int k = 0; k <= 8; ++k) {
    double want = std::sin((k + 1) * t) / std::sin(t);
    CHECK(c[k].real() == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(c[k].imag()) < 1e-12);
  }
}

TEST_CASE("local coefficients satisfy the Hecke-type recurrence") {
  // Degree 2 with alpha*beta = q: c_{k+1} = c_1 c_k - q c_{k-1}.
  Complex alpha(0.6, 0.55);
  Complex beta = Complex(0.81, 0.0) / alpha;
  std::vector<Complex> alphas = {alpha, beta};
  auto c = euler::expand_local_factor(alphas, 12);
  Complex q = alpha * beta;
  for (int k = 1; k <= 11; ++k) CHECK(close(c[k + 1], c[1] * c[k] - q * c[k - 1]));
}

TEST_CASE("assemble_series is multiplicative and bounded") {
  const std::size_t n = 10000;
  auto data = euler::synth_satake(3, n, SynthModel::RamanujanUniform, 42);
  auto s = euler::assemble_series(data, n);
  CHECK(s.value(1) == 1.0);
  auto t = lfosc::arith::build_sieve(n);
  for (std::size_t a = 2; a <= n; ++a) {
    for (std::size_t b = a; a * b <= n; ++b) {
      if (std::gcd(a, b) != 1) continue;
      CAPTURE(a);
      CAPTURE(b);
      CHECK(s.value(a * b) == doctest::Approx(s.value(a) * s.value(b)).epsilon(1e-10));
    }
  }
  // |a(p)| <= m for unitary parameters.
  for (std::uint32_t p : t.primes) CHECK(std::abs(s.value(p)) <= 3.0 + 1e-9);
}

TEST_CASE("assemble_series requires parameters at every prime") {
  auto data = euler::synth_satake(2, 50, SynthModel::RamanujanUniform, 7);
  CHECK_NOTHROW(euler::assemble_series(data, 50));
  try {
    euler::assemble_series(data, 200);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::precondition);
  }
}

TEST_CASE("synthetic data is deterministic in the seed") {
  auto a = euler::synth_satake(4, 500, SynthModel::RamanujanUniform, 99);
  auto b = euler::synth_satake(4, 500, SynthModel::RamanujanUniform, 99);
  auto c = euler::synth_satake(4, 500, SynthModel::RamanujanUniform, 100);
  REQUIRE(a.per_prime.size() == b.per_prime.size());
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.per_prime.size(); ++i) {
    if (a.per_prime[i] != b.per_prime[i]) identical = false;
    if (a.per_prime[i].second != c.per_prime[i].second) differs = true;
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("synthetic models and their moduli") {
  auto uni = euler::synth_satake(2, 100, SynthModel::RamanujanUniform, 3);
  CHECK(uni.ramanujan_exponent == 0.0);
  for (const auto& [p, alphas] : uni.per_prime)
    for (const auto& a : alphas) CHECK(std::abs(a) == doctest::Approx(1.0).epsilon(1e-12));

  auto lrs = euler::synth_satake(3, 100, SynthModel::LrsExtremal, 3);
  CHECK(lrs.ramanujan_exponent == doctest::Approx(0.4));
  const auto* at2 = lrs.find(2);
  REQUIRE(at2 != nullptr);
  CHECK(std::abs((*at2)[0]) == doctest::Approx(std::pow(2.0, 0.4)).epsilon(1e-12));

  CHECK_THROWS_AS(euler::synth_satake(3, 100, SynthModel::SatoTate, 1), Error);
  CHECK_THROWS_AS(euler::synth_satake(1, 100, SynthModel::RamanujanUniform, 1), Error);
  CHECK_NOTHROW(euler::synth_satake(2, 100, SynthModel::SatoTate, 1));
}

TEST_CASE("sato-tate angles have the semicircle density") {
  const std::size_t n = 200000;
  auto data = euler::synth_satake(2, n, SynthModel::SatoTate, 17);
  // E[cos^2 theta] = 1/4 under (2/pi) sin^2.
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [p, alphas] : data.per_prime) {
    double c = alphas[0].real();
    sum += c * c;
    ++count;
  }
  CHECK(count > 17000);
  CHECK(sum / double(count) == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("rankin_selberg_local is the pairwise product list") {
  std::vector<Complex> a = {Complex(0.5, 0.1), Complex(0.2, -0.3)};
  std::vector<Complex> b = {Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(-1.0, 0.0)};
  auto prod = euler::rankin_selberg_local(a, b);
  REQUIRE(prod.size() == 6);
  std::size_t idx = 0;
  for (const auto& x : a)
    for (const auto& y : b) CHECK(close(prod[idx++], x * y));
}

TEST_CASE("rankin_selberg_data against the contragredient has real positive prime values") {
  auto data = euler::synth_satake(2, 1000, SynthModel::RamanujanUniform, 5);
  auto rs = euler::rankin_selberg_data(data, euler::contragredient(data));
  CHECK(rs.degree == 4);
  auto a = euler::assemble_series(data, 1000);
  auto s = euler::assemble_series(rs, 1000);
  auto t = lfosc::arith::build_sieve(1000);
  // Equality |a(p)|^2 = a_{pi x pi~}(p) at primes.
  for (std::uint32_t p : t.primes)
    CHECK(s.value(p) == doctest::Approx(a.value(p) * a.value(p)).epsilon(1e-9));
}

TEST_CASE("symmetric_power_local lists alpha^{j-2t}") {
  Complex alpha = std::polar(1.0, 0.7);
  std::vector<Complex> pair = {alpha, std::conj(alpha)};
  auto sym3 = euler::symmetric_power_local(pair, 3);
  REQUIRE(sym3.size() == 4);
  for (int tpow = 0; tpow <= 3; ++tpow)
    CHECK(close(sym3[tpow], std::polar(1.0, 0.7 * (3 - 2 * tpow))));

  std::vector<Complex> bad = {Complex(2.0, 0.0), Complex(1.0, 0.0)};
  CHECK_THROWS_AS(euler::symmetric_power_local(bad, 2), Error);
}

TEST_CASE("serialization round trip") {
  auto data = euler::synth_satake(3, 50, SynthModel::LrsExtremal, 9);
  std::ostringstream os;
  euler::write_satake(data, os);
  std::istringstream is(os.str());
  auto back = euler::read_satake(is);
  CHECK(back.degree == data.degree);
  CHECK(back.conductor == data.conductor);
  CHECK(back.model == data.model);
  CHECK(back.seed == data.seed);
  REQUIRE(back.per_prime.size() == data.per_prime.size());
  for (std::size_t i = 0; i < data.per_prime.size(); ++i) {
    CHECK(back.per_prime[i].first == data.per_prime[i].first);
    CHECK(back.per_prime[i].second == data.per_prime[i].second); // %.17g exact
  }
  CHECK(back.ramanujan_exponent == doctest::Approx(data.ramanujan_exponent).epsilon(1e-12));
  CHECK_NOTHROW(euler::validate(back));
}

TEST_CASE("read_satake reports line numbers") {
  auto expect_parse = [](const std::string& text, const char* needle) {
    std::istringstream is(text);
    try {
      euler::read_satake(is);
      FAIL_CHECK("expected parse error for: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == errc::parse_error);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_parse("conductor=1 model=x seed=0\n", "degree");
  expect_parse("degree=2 flavor=odd\n", "unknown header key");
  expect_parse("degree=2\n2 1.0 0.0\n", "line 2");
  expect_parse("degree=1\n2 1.0 0.0 9.0\n", "trailing values");
  expect_parse("degree=abc\n", "bad value");
}

TEST_CASE("validate rejects inconsistent data") {
  auto data = euler::synth_satake(2, 30, SynthModel::RamanujanUniform, 1);
  CHECK_NOTHROW(euler::validate(data));

  auto broken = data;
  broken.per_prime[0].second[0] = Complex(3.0, 0.0); // above the declared bound
  CHECK_THROWS_AS(euler::validate(broken), Error);

  auto dup = data;
  dup.per_prime.push_back(dup.per_prime.back());
  CHECK_THROWS_AS(euler::validate(dup), Error);

  auto short_list = data;
  short_list.per_prime[0].second.pop_back();
  CHECK_THROWS_AS(euler::validate(short_list), Error);
}

TEST_CASE("file round trip and io errors") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "lfosc-test-euler";
  fs::create_directories(dir);
  auto path = dir / "satake.txt";
  auto data = euler::synth_satake(2, 40, SynthModel::RamanujanUniform, 11);
  euler::write_satake_file(data, path);
  auto back = euler::read_satake_file(path);
  CHECK(back.per_prime == data.per_prime);
  try {
    euler::read_satake_file(dir / "missing.txt");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::io_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("model names round trip") {
  for (auto m : {SynthModel::RamanujanUniform, SynthModel::SatoTate, SynthModel::LrsExtremal}) {
    auto parsed = euler::parse_model(euler::to_string(m));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == m);
  }
  CHECK(!euler::parse_model("no-such-model").has_value());
}
