#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lfosc/series.hpp"

namespace lfosc::oscillate {

/// Exponent data of the sign-change criterion: a(n) = O(n^alpha),
/// sum_{n<=x} a(n) = O(x^beta), sum_{n<=x} a(n)^2 = cx + O(x^gamma), window
/// exponent r. The criterion applies when alpha+beta < 1 and
/// max{alpha+beta, gamma} < r < 1.
struct ExponentProfile {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double r = 0.0;
  double epsilon = 0.01; // slack added to preset thresholds to place r
  std::string preset_name;

  double threshold() const { return std::max(alpha + beta, gamma); }
  bool valid() const { return alpha + beta < 1.0 && threshold() < r && r < 1.0; }
};

struct WindowRow {
  std::size_t x = 0;
  std::size_t window_len = 0; // ceil(x^r)
  std::size_t changes = 0;
  double gap_fraction = 0.0;
};

struct CumulativeRow {
  std::size_t x = 0;
  std::size_t cumulative = 0;
};

struct WindowReport {
  ExponentProfile profile;
  std::vector<WindowRow> windows;
  std::vector<CumulativeRow> cumulative;
  double fraction_with_change = 0.0;
  // Smallest sampled x such that every window from there on has a change.
  std::optional<std::size_t> all_changes_from_x;
  // log-log slope of the cumulative count; absent when it never leaves 0.
  std::optional<double> cumulative_exponent;
  double cumulative_exponent_stderr = 0.0;
};

struct RangeScan {
  std::size_t changes = 0;
  int last_sign = 0; // sign of the last nonzero present entry <= hi, else carry
};

// Counts opposite-sign pairs of consecutive nonzero present entries whose
// right member lies in [lo, hi]. carry_sign is the sign of the last nonzero
// entry before lo (0 for none); chaining scans over a tiling of [1, x]
// therefore reproduces the full cumulative count at x exactly. Zeros and
// absent entries are transparent.
RangeScan count_sign_changes(const CoefficientSeries& seq, std::size_t lo, std::size_t hi,
                             int carry_sign = 0);

// Changes between consecutive nonzero entries inside [x, x + ceil(x^r)] only
// (no carry from before the window).
std::size_t sign_changes_window(const CoefficientSeries& seq, std::size_t x, double r);

// Windows at x = x_min, x_min*ratio, ... up to x_max (integer-rounded,
// deduplicated); cumulative counts on the same grid by one linear scan.
// Deterministic; window counting parallelizes per LFOSC_THREADS with
// bit-identical results.
WindowReport scan_windows(const CoefficientSeries& seq, const ExponentProfile& profile,
                          std::size_t x_min, std::size_t x_max, double ratio = 1.1);

// Prefix sums S(x) = sum_{n<=x} a(n); exact for exact input, compensated
// floating summation otherwise. Absent entries contribute 0.
CoefficientSeries partial_sums(const CoefficientSeries& seq);

enum class FitMode { SupEnvelope, Direct };

struct MomentFit {
  double slope = 0.0;             // c in c*x^s
  double exponent = 0.0;          // s
  double exponent_stderr = 0.0;
  double residual_exponent = 0.0; // envelope slope of |S(x) - c*x^s|
  std::vector<std::pair<double, double>> sample_points; // (x, value) as fitted
  bool flagged = false;
  std::string flag_reason;
};

// Least squares of log|value| against log x. SupEnvelope first replaces
// value(x) by max_{y<=x}|value(y)| (the empirical proxy for an O-exponent);
// zero values are dropped. Requires >= 8 points with strictly increasing x.
MomentFit fit_growth_exponent(const std::vector<std::pair<double, double>>& points,
                              FitMode mode);

// Fits sum_{n<=x} a(n)^2 = c*x at the sample points (least squares through
// the origin); flags c <= 0. residual_exponent is the envelope slope of
// |S(x) - c*x|, 0 when the residuals all vanish.
MomentFit second_moment_fit(const CoefficientSeries& seq,
                            const std::vector<std::size_t>& x_points);

// Same fit for the first moment sum_{n<=x} a(n) = c*x (Rankin-Selberg mean).
MomentFit linear_moment_fit(const CoefficientSeries& seq,
                            const std::vector<std::size_t>& x_points);

// Geometric integer grid in [x_min, x_max], strictly increasing.
std::vector<std::size_t> sample_grid(std::size_t x_min, std::size_t x_max,
                                     double ratio = 1.3);

// Named exponent presets; each r sits epsilon above its threshold. Only
// presets whose criterion predicate holds are listed.
std::map<std::string, ExponentProfile> preset_profiles(double epsilon = 0.01);

// Resolves a preset by name; additionally accepts glm(m) and glm-ramanujan(m)
// for any m >= 2 (profiles with an unattainable threshold come back with
// valid() false). Unknown names and m < 2 are invalid-argument errors.
ExponentProfile preset_profile(std::string_view name, double epsilon = 0.01);

// CSV emission: `x,window_len,changes,gap_fraction` and `x,cumulative`.
void write_windows_csv(const WindowReport& report, std::ostream& os);
void write_cumulative_csv(const WindowReport& report, std::ostream& os);

} // namespace lfosc::oscillate
