// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances and budgets are pinned here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lfosc/arith.hpp"
#include "lfosc/error.hpp"
#include "lfosc/euler.hpp"
#include "lfosc/experiment.hpp"
#include "lfosc/gl2.hpp"
#include "lfosc/oscillate.hpp"
#include "lfosc/series.hpp"
#include "lfosc/siegel.hpp"

using lfosc::BigInt;
using lfosc::CoefficientSeries;
using lfosc::Rational;
namespace arith = lfosc::arith;
namespace euler = lfosc::euler;
namespace gl2 = lfosc::gl2;
namespace osc = lfosc::oscillate;
namespace siegel = lfosc::siegel;
namespace experiment = lfosc::experiment;
namespace fs = std::filesystem;

namespace {

constexpr double kReassemblyRelTol = 1e-9;  // criterion 2
constexpr double kConvolutionTol = 1e-9;    // criterion 3, inequality and prime equality
constexpr double kResidualBound = 3.0 / 5.0 + 0.05; // criterion 4
constexpr double kWindowExponent = 0.61;    // criterion 5
constexpr std::size_t kX0Required = 1000;   // criterion 5
constexpr double kCumulativeExponentMin = 0.34; // criterion 5
constexpr double kDivisorBoundTol = 1e-9;   // criterion 6
constexpr double kThresholdTol = 1e-12;     // criterion 7
constexpr double kTauBudgetSeconds = 10.0;  // criterion 1
constexpr double kMomentBudgetSeconds = 120.0; // criterion 4

struct Checker {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Shared eigenform expansions; computed on first use.
std::optional<gl2::EigenformSeries> g_tau_10k;
std::optional<gl2::EigenformSeries> g_tau_1m;

const gl2::EigenformSeries& tau_10k() {
  if (!g_tau_10k) g_tau_10k = gl2::delta_q_expansion(10000);
  return *g_tau_10k;
}

const gl2::EigenformSeries& tau_1m() {
  if (!g_tau_1m) g_tau_1m = gl2::delta_q_expansion(1000000);
  return *g_tau_1m;
}

// Brute-force oracle: q prod_{k>=1} (1-q^k)^24 by repeated dense subtraction.
std::vector<BigInt> tau_oracle(std::size_t n) {
  std::vector<BigInt> f(n, 0);
  f[0] = 1;
  for (std::size_t k = 1; k < n; ++k)
    for (int rep = 0; rep < 24; ++rep)
      for (std::size_t i = n - 1; i >= k; --i) f[i] -= f[i - k];
  std::vector<BigInt> tau(n + 1, 0);
  for (std::size_t i = 0; i + 1 <= n; ++i) tau[i + 1] = f[i];
  return tau;
}

void criterion_1(Checker& c) {
  auto t0 = std::chrono::steady_clock::now();
  const auto& f = tau_10k();

  auto oracle = tau_oracle(100);
  for (std::size_t n = 1; n <= 100; ++n)
    c.require(f.exact[n] == oracle[n],
              "tau(" + std::to_string(n) + ") disagrees with the direct expansion");
  c.require(f.exact[2] == -24, "tau(2) != -24");
  c.require(f.exact[4] == -1472, "tau(4) != -1472");
  c.require(f.exact[6] == -6048, "tau(6) != -6048");

  auto t = arith::build_sieve(10000);
  for (std::uint32_t p : t.primes) {
    BigInt p11 = 1;
    for (int i = 0; i < 11; ++i) p11 *= p;
    for (std::size_t pk = p; pk * p <= 10000; pk *= p)
      c.require(f.exact[pk * p] == f.exact[p] * f.exact[pk] - p11 * f.exact[pk / p],
                "Hecke recurrence fails at " + std::to_string(pk * p));
  }

  double dt = seconds_since(t0);
  c.require(dt < kTauBudgetSeconds,
            "runtime " + fmt(dt) + " s exceeds " + fmt(kTauBudgetSeconds) + " s");
}

void criterion_2(Checker& c) {
  const auto& f = tau_10k();
  auto t = arith::build_sieve(10000);
  for (std::uint32_t p : t.primes) {
    BigInt p11 = 1;
    for (int i = 0; i < 11; ++i) p11 *= p;
    c.require(f.exact[p] * f.exact[p] < 4 * p11,
              "|tau(" + std::to_string(p) + ")| >= 2 p^{11/2}");
  }

  auto data = gl2::satake_angles(f, 1000);
  auto reassembled = euler::assemble_series(data, 1000);
  auto reference = gl2::normalized_series(f);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 1000; ++n) {
    double want = reference.value(n);
    double rel = std::abs(reassembled.value(n) - want) / std::abs(want);
    worst = std::max(worst, rel);
  }
  c.require(worst < kReassemblyRelTol,
            "reassembly relative error " + fmt(worst) + " >= " + fmt(kReassemblyRelTol));
}

void check_domination(Checker& c, const euler::SatakeData& data, std::size_t n,
                      const std::string& tag) {
  auto a = euler::assemble_series(data, n);
  auto rs = euler::assemble_series(
      euler::rankin_selberg_data(data, euler::contragredient(data)), n);
  double worst_slack = 0.0, worst_prime_dev = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    double ai = a.value(i);
    worst_slack = std::max(worst_slack, ai * ai - rs.value(i));
  }
  auto t = arith::build_sieve(n);
  for (std::uint32_t p : t.primes) {
    double ap = a.value(p);
    worst_prime_dev = std::max(worst_prime_dev, std::abs(rs.value(p) - ap * ap));
  }
  c.require(worst_slack <= kConvolutionTol,
            tag + ": a(n)^2 exceeds the convolution by " + fmt(worst_slack));
  c.require(worst_prime_dev <= kConvolutionTol,
            tag + ": prime equality off by " + fmt(worst_prime_dev));
}

void criterion_3(Checker& c) {
  const std::size_t n = 10000;
  check_domination(c, gl2::satake_angles(tau_10k(), n), n, "delta");
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    int m = (seed % 2 == 1) ? 2 : 3;
    auto data = euler::synth_satake(m, n, euler::SynthModel::RamanujanUniform, seed);
    check_domination(c, data, n, "gl" + std::to_string(m) + " seed " + std::to_string(seed));
  }
}

void criterion_4(Checker& c) {
  auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 1000000;
  const auto& f = tau_1m();
  auto s = gl2::normalized_series(f);
  auto grid = osc::sample_grid(1000, n, 1.1);

  auto second = osc::second_moment_fit(s, grid);
  c.require(second.slope > 0.0, "second-moment slope " + fmt(second.slope) + " <= 0");
  c.require(second.residual_exponent <= kResidualBound,
            "second-moment residual exponent " + fmt(second.residual_exponent) + " > " +
                fmt(kResidualBound));

  auto angles = gl2::satake_angles(f, n);
  auto rs_series = euler::assemble_series(
      euler::rankin_selberg_data(angles, euler::contragredient(angles)), n);
  auto first = osc::linear_moment_fit(rs_series, grid);
  c.require(first.slope > 0.0, "convolution mean slope " + fmt(first.slope) + " <= 0");
  c.require(first.residual_exponent <= kResidualBound,
            "convolution mean residual exponent " + fmt(first.residual_exponent) + " > " +
                fmt(kResidualBound));

  double dt = seconds_since(t0);
  c.require(dt < kMomentBudgetSeconds,
            "runtime " + fmt(dt) + " s exceeds " + fmt(kMomentBudgetSeconds) + " s");
}

void criterion_5(Checker& c) {
  const auto& f = tau_1m();
  auto s = gl2::normalized_series(f);

  osc::ExponentProfile profile = osc::preset_profile("gl2-selfdual");
  profile.r = kWindowExponent;
  auto report = osc::scan_windows(s, profile, 10, 100000, 1.1);
  c.require(report.all_changes_from_x.has_value(),
            "some window near the top of the range has no sign change");
  if (report.all_changes_from_x)
    c.require(*report.all_changes_from_x <= kX0Required,
              "x0 = " + std::to_string(*report.all_changes_from_x) + " > " +
                  std::to_string(kX0Required));

  // Cumulative counts to 1e6 by chained range scans; log-log slope >= 0.34.
  auto grid = osc::sample_grid(1000, 1000000, 1.1);
  std::vector<std::pair<double, double>> pts;
  std::size_t lo = 1, total = 0;
  int carry = 0;
  for (std::size_t x : grid) {
    auto scan = osc::count_sign_changes(s, lo, x, carry);
    total += scan.changes;
    carry = scan.last_sign;
    lo = x + 1;
    pts.emplace_back(double(x), double(total));
  }
  auto fit = osc::fit_growth_exponent(pts, osc::FitMode::Direct);
  c.require(fit.exponent >= kCumulativeExponentMin,
            "cumulative exponent " + fmt(fit.exponent) + " < " + fmt(kCumulativeExponentMin));
}

void criterion_6(Checker& c) {
  const std::size_t n = 10000;
  auto d4 = arith::divisor_function(4, n);
  auto d5 = arith::divisor_function(5, n);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto af = siegel::spinor_series(siegel::synth_triples(n, seed), n);
    auto lam = siegel::normalized_eigenvalues(af);
    double worst4 = 0.0, worst5 = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      worst4 = std::max(worst4, std::abs(af.value(i)) - d4.value(i));
      worst5 = std::max(worst5, std::abs(lam.value(i)) - d5.value(i));
    }
    c.require(worst4 <= kDivisorBoundTol,
              "seed " + std::to_string(seed) + ": |a_F| exceeds d_4 by " + fmt(worst4));
    c.require(worst5 <= kDivisorBoundTol,
              "seed " + std::to_string(seed) + ": |lambda| exceeds d_5 by " + fmt(worst5));
  }

  // Unnormalization round trip, exact: lambda -> a_F via the d^2 -> 1/d series.
  auto af = siegel::spinor_series(siegel::synth_triples(n, 1), n);
  auto exact_af = CoefficientSeries::exact(n, "af-exact");
  for (std::size_t i = 1; i <= n; ++i) exact_af.set(i, Rational(af.value(i)));
  auto lam = arith::mobius_scaled_convolve(exact_af);
  auto back = arith::dirichlet_convolve(lam, arith::zeta_2s_plus_1(n));
  bool exact = true;
  for (std::size_t i = 1; i <= n; ++i)
    if (back.exact_value(i) != exact_af.exact_value(i)) exact = false;
  c.require(exact, "rational round trip is not exact");
}

void criterion_7(Checker& c) {
  auto gl2p = osc::preset_profile("gl2-selfdual");
  c.require(std::abs(gl2p.threshold() - 3.0 / 5.0) < kThresholdTol &&
                gl2p.valid(),
            "gl2-selfdual threshold/validity wrong");
  auto sp = osc::preset_profile("siegel-spinor");
  c.require(std::abs(sp.threshold() - 41.0 / 47.0) < kThresholdTol && sp.valid(),
            "siegel-spinor threshold/validity wrong");
  for (int m = 2; m <= 6; ++m) {
    auto p = osc::preset_profile("glm-ramanujan(" + std::to_string(m) + ")");
    double want = (double(m) * m - 1.0) / (double(m) * m + 1.0);
    c.require(std::abs(p.threshold() - want) < kThresholdTol && p.valid(),
              "glm-ramanujan(" + std::to_string(m) + ") threshold/validity wrong");
    p.r = p.threshold() - 0.01;
    c.require(!p.valid(), "r below threshold accepted at m = " + std::to_string(m));
  }

  auto one_signed = CoefficientSeries::float64(20000, "positive");
  for (std::size_t i = 1; i <= 20000; ++i) one_signed.set(i, 1.0 + double(i % 7));
  auto report = osc::scan_windows(one_signed, gl2p, 10, 10000, 1.1);
  bool zero_everywhere = report.fraction_with_change == 0.0;
  for (const auto& row : report.windows)
    if (row.changes != 0) zero_everywhere = false;
  c.require(zero_everywhere, "one-signed sequence reported a sign change");
  c.require(osc::count_sign_changes(one_signed, 1, 20000).changes == 0,
            "one-signed cumulative count nonzero");
}

void criterion_8(Checker& c) {
  auto base = fs::temp_directory_path() / "lfosc-acceptance-determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  auto config_path = base / "exp.cfg";
  {
    std::ofstream os(config_path);
    os << "source=synthetic\nm=2\nseed=7\nN=20000\npreset=glm(2)\n"
       << "tasks=windows,cumulative,moments\nx_max=10000\n";
  }
  auto config = experiment::parse_config(config_path);
  config.outputs = (base / "run1").string();
  auto r1 = experiment::run(config);
  config.outputs = (base / "run2").string();
  auto r2 = experiment::run(config);
  c.require(r1.files.size() == r2.files.size(), "rerun produced a different file set");
  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };
  for (std::size_t i = 0; i < std::min(r1.files.size(), r2.files.size()); ++i)
    c.require(slurp(r1.files[i]) == slurp(r2.files[i]),
              "rerun differs in " + r1.files[i].filename().string());

  auto s = gl2::normalized_series(tau_10k());
  auto profile = osc::preset_profile("gl2-selfdual");
  setenv("LFOSC_THREADS", "1", 1);
  auto seq = osc::scan_windows(s, profile, 10, 5000, 1.1);
  setenv("LFOSC_THREADS", "4", 1);
  auto par = osc::scan_windows(s, profile, 10, 5000, 1.1);
  unsetenv("LFOSC_THREADS");
  bool same = seq.windows.size() == par.windows.size() &&
              seq.fraction_with_change == par.fraction_with_change;
  for (std::size_t i = 0; same && i < seq.windows.size(); ++i)
    same = seq.windows[i].x == par.windows[i].x &&
           seq.windows[i].changes == par.windows[i].changes &&
           seq.windows[i].gap_fraction == par.windows[i].gap_fraction;
  c.require(same, "threaded scan differs from sequential scan");
  fs::remove_all(base);
}

} // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<void(Checker&)> body;
  };
  const std::vector<Entry> criteria = {
      {1, "exact tau values and Hecke recurrence", criterion_1},
      {2, "prime bound and Satake reassembly", criterion_2},
      {3, "convolution domination with prime equality", criterion_3},
      {4, "moment growth fits at N = 1e6", criterion_4},
      {5, "window sign changes and cumulative growth", criterion_5},
      {6, "spinor divisor bounds and exact round trip", criterion_6},
      {7, "preset validity gates and one-signed guard", criterion_7},
      {8, "byte-identical reruns and thread invariance", criterion_8},
  };

  int failed = 0;
  for (const auto& entry : criteria) {
    Checker c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      entry.body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    double dt = seconds_since(t0);
    if (c.failures.empty()) {
      std::printf("[PASS] criterion %d: %s (%.1f s)\n", entry.id, entry.name, dt);
    } else {
      ++failed;
      std::printf("[FAIL] criterion %d: %s: %s (%zu issue%s, %.1f s)\n", entry.id,
                  entry.name, c.failures.front().c_str(), c.failures.size(),
                  c.failures.size() == 1 ? "" : "s", dt);
    }
    std::fflush(stdout);
  }
  if (failed == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d of %zu criteria FAILED\n", failed, criteria.size());
  return failed;
}
