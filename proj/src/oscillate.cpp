#include "lfosc/oscillate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "lfosc/error.hpp"

namespace lfosc::oscillate {

namespace {

int sign_at(const CoefficientSeries& seq, std::size_t n) {
  if (!seq.present(n)) return 0;
  if (seq.is_exact()) return seq.exact_value(n).sign();
  double v = seq.value(n);
  return v > 0.0 ? 1 : v < 0.0 ? -1 : 0;
}

std::size_t window_length(std::size_t x, double r) {
  return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(x), r)));
}

int thread_count() {
  const char* env = std::getenv("LFOSC_THREADS");
  if (!env) return 1;
  return std::clamp(std::atoi(env), 1, 64);
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};

// Least squares of log v against log x; inputs must be positive.
std::optional<LineFit> loglog_ls(const std::vector<std::pair<double, double>>& pts) {
  const std::size_t n = pts.size();
  if (n < 2) return std::nullopt;
  double mt = 0.0, mu = 0.0;
  for (const auto& [x, v] : pts) {
    mt += std::log(x);
    mu += std::log(v);
  }
  mt /= static_cast<double>(n);
  mu /= static_cast<double>(n);
  double stt = 0.0, stu = 0.0;
  for (const auto& [x, v] : pts) {
    double dt = std::log(x) - mt, du = std::log(v) - mu;
    stt += dt * dt;
    stu += dt * du;
  }
  if (stt == 0.0) return std::nullopt;
  LineFit fit;
  fit.slope = stu / stt;
  fit.intercept = mu - fit.slope * mt;
  if (n > 2) {
    double rss = 0.0;
    for (const auto& [x, v] : pts) {
      double e = std::log(v) - (fit.intercept + fit.slope * std::log(x));
      rss += e * e;
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / stt);
  }
  return fit;
}

std::vector<std::pair<double, double>> envelope_abs(
    const std::vector<std::pair<double, double>>& pts, FitMode mode) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pts.size());
  double running = 0.0;
  for (const auto& [x, v] : pts) {
    double a = std::abs(v);
    if (mode == FitMode::SupEnvelope) {
      running = std::max(running, a);
      a = running;
    }
    if (a > 0.0) out.emplace_back(x, a);
  }
  return out;
}

// Envelope slope of the residuals; 0 when they (essentially) vanish.
double residual_envelope_exponent(const std::vector<std::pair<double, double>>& residuals) {
  auto pts = envelope_abs(residuals, FitMode::SupEnvelope);
  if (pts.size() < 2) return 0.0;
  auto fit = loglog_ls(pts);
  return fit ? fit->slope : 0.0;
}

void check_sample_points(const CoefficientSeries& seq, const std::vector<std::size_t>& xs) {
  if (xs.size() < 2) raise(errc::insufficient_data, "moment fit needs at least 2 sample points");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 1 || (i > 0 && xs[i] <= xs[i - 1]))
      raise(errc::invalid_argument, "sample points must be strictly increasing and >= 1");
  }
  if (xs.back() > seq.limit())
    raise(errc::range_error, "sample point " + std::to_string(xs.back()) +
                                 " exceeds series limit " + std::to_string(seq.limit()));
}

MomentFit origin_ls_fit(const CoefficientSeries& seq, const std::vector<std::size_t>& xs,
                        bool square) {
  check_sample_points(seq, xs);
  std::vector<double> sums(xs.size());
  if (seq.is_exact()) {
    Rational acc = 0;
    std::size_t j = 0;
    for (std::size_t n = 1; n <= xs.back(); ++n) {
      if (seq.present(n)) {
        const Rational& v = seq.exact_value(n);
        acc += square ? v * v : v;
      }
      while (j < xs.size() && n == xs[j]) sums[j++] = acc.convert_to<double>();
    }
  } else {
    double s = 0.0, comp = 0.0;
    std::size_t j = 0;
    for (std::size_t n = 1; n <= xs.back(); ++n) {
      if (seq.present(n)) {
        double v = seq.value(n);
        double y = (square ? v * v : v) - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
      }
      while (j < xs.size() && n == xs[j]) sums[j++] = s;
    }
  }

  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = static_cast<double>(xs[i]);
    sxy += x * sums[i];
    sxx += x * x;
  }
  MomentFit fit;
  fit.slope = sxy / sxx;
  fit.exponent = 1.0;
  fit.sample_points.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.sample_points.emplace_back(static_cast<double>(xs[i]), sums[i]);
  std::vector<std::pair<double, double>> residuals;
  residuals.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    residuals.emplace_back(static_cast<double>(xs[i]),
                           sums[i] - fit.slope * static_cast<double>(xs[i]));
  fit.residual_exponent = residual_envelope_exponent(residuals);
  if (fit.slope <= 0.0) {
    fit.flagged = true;
    fit.flag_reason = "fitted slope nonpositive";
  }
  return fit;
}

} // namespace

RangeScan count_sign_changes(const CoefficientSeries& seq, std::size_t lo, std::size_t hi,
                             int carry_sign) {
  if (lo < 1 || lo > hi || hi > seq.limit())
    raise(errc::range_error, "count_sign_changes: range [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "] invalid for limit " +
                                 std::to_string(seq.limit()));
  RangeScan scan;
  scan.last_sign = carry_sign;
  for (std::size_t n = lo; n <= hi; ++n) {
    int s = sign_at(seq, n);
    if (s == 0) continue;
    if (scan.last_sign != 0 && s != scan.last_sign) ++scan.changes;
    scan.last_sign = s;
  }
  return scan;
}

std::size_t sign_changes_window(const CoefficientSeries& seq, std::size_t x, double r) {
  if (x < 1) raise(errc::invalid_argument, "sign_changes_window: x must be >= 1");
  if (!(r > 0.0 && r < 1.0))
    raise(errc::invalid_argument, "sign_changes_window: r must lie in (0, 1)");
  std::size_t len = window_length(x, r);
  if (x + len > seq.limit())
    raise(errc::range_error, "window [" + std::to_string(x) + ", " +
                                 std::to_string(x + len) + "] exceeds series limit " +
                                 std::to_string(seq.limit()));
  return count_sign_changes(seq, x, x + len, 0).changes;
}

WindowReport scan_windows(const CoefficientSeries& seq, const ExponentProfile& profile,
                          std::size_t x_min, std::size_t x_max, double ratio) {
  if (!(profile.r > 0.0 && profile.r < 1.0))
    raise(errc::invalid_argument, "scan_windows: window exponent r must lie in (0, 1)");
  if (x_min < 1 || x_min > x_max)
    raise(errc::invalid_argument, "scan_windows: need 1 <= x_min <= x_max");
  std::size_t top = x_max + window_length(x_max, profile.r);
  if (top > seq.limit())
    raise(errc::range_error, "scan_windows: largest window reaches " + std::to_string(top) +
                                 ", beyond series limit " + std::to_string(seq.limit()));

  WindowReport report;
  report.profile = profile;
  std::vector<std::size_t> grid = sample_grid(x_min, x_max, ratio);

  report.windows.resize(grid.size());
  auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t x = grid[i];
      WindowRow& row = report.windows[i];
      row.x = x;
      row.window_len = window_length(x, profile.r);
      row.changes = count_sign_changes(seq, x, x + row.window_len, 0).changes;
      row.gap_fraction = seq.gap_fraction(x, x + row.window_len);
    }
  };
  int threads = std::min<int>(thread_count(), static_cast<int>(grid.size()));
  if (threads <= 1) {
    fill_rows(0, grid.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (grid.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(grid.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(fill_rows, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  report.cumulative.reserve(grid.size());
  {
    std::size_t count = 0;
    int prev = 0;
    std::size_t j = 0;
    for (std::size_t n = 1; n <= x_max; ++n) {
      int s = sign_at(seq, n);
      if (s != 0) {
        if (prev != 0 && s != prev) ++count;
        prev = s;
      }
      while (j < grid.size() && n == grid[j]) {
        report.cumulative.push_back({grid[j], count});
        ++j;
      }
    }
  }

  std::size_t with_change = 0;
  for (const WindowRow& row : report.windows)
    if (row.changes > 0) ++with_change;
  report.fraction_with_change =
      static_cast<double>(with_change) / static_cast<double>(report.windows.size());

  std::size_t suffix = report.windows.size();
  while (suffix > 0 && report.windows[suffix - 1].changes > 0) --suffix;
  if (suffix < report.windows.size())
    report.all_changes_from_x = report.windows[suffix].x;

  std::vector<std::pair<double, double>> counts;
  for (const CumulativeRow& row : report.cumulative)
    if (row.cumulative > 0)
      counts.emplace_back(static_cast<double>(row.x), static_cast<double>(row.cumulative));
  if (counts.size() >= 8) {
    MomentFit fit = fit_growth_exponent(counts, FitMode::Direct);
    report.cumulative_exponent = fit.exponent;
    report.cumulative_exponent_stderr = fit.exponent_stderr;
  }
  return report;
}

CoefficientSeries partial_sums(const CoefficientSeries& seq) {
  CoefficientSeries out(seq.kind(), seq.limit(), seq.label() + "-partial");
  if (seq.is_exact()) {
    Rational acc = 0;
    for (std::size_t n = 1; n <= seq.limit(); ++n) {
      if (seq.present(n)) acc += seq.exact_value(n);
      out.set(n, acc);
    }
  } else {
    double s = 0.0, comp = 0.0;
    for (std::size_t n = 1; n <= seq.limit(); ++n) {
      if (seq.present(n)) {
        double y = seq.value(n) - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
      }
      out.set(n, s);
    }
  }
  return out;
}

MomentFit fit_growth_exponent(const std::vector<std::pair<double, double>>& points,
                              FitMode mode) {
  if (points.size() < 8)
    raise(errc::insufficient_data, "fit_growth_exponent: need at least 8 points, got " +
                                       std::to_string(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].first <= 0.0 || (i > 0 && points[i].first <= points[i - 1].first))
      raise(errc::invalid_argument,
            "fit_growth_exponent: x values must be positive and strictly increasing");
  }
  auto pts = envelope_abs(points, mode);
  if (pts.size() < 8)
    raise(errc::insufficient_data,
          "fit_growth_exponent: fewer than 8 nonzero points after transform");
  auto line = loglog_ls(pts);
  if (!line) raise(errc::insufficient_data, "fit_growth_exponent: degenerate abscissae");
  MomentFit fit;
  fit.slope = std::exp(line->intercept);
  fit.exponent = line->slope;
  fit.exponent_stderr = line->slope_stderr;
  fit.sample_points = std::move(pts);
  return fit;
}

MomentFit second_moment_fit(const CoefficientSeries& seq,
                            const std::vector<std::size_t>& x_points) {
  return origin_ls_fit(seq, x_points, true);
}

MomentFit linear_moment_fit(const CoefficientSeries& seq,
                            const std::vector<std::size_t>& x_points) {
  return origin_ls_fit(seq, x_points, false);
}

std::vector<std::size_t> sample_grid(std::size_t x_min, std::size_t x_max, double ratio) {
  if (x_min < 1 || x_min > x_max)
    raise(errc::invalid_argument, "sample_grid: need 1 <= x_min <= x_max");
  if (!(ratio > 1.0)) raise(errc::invalid_argument, "sample_grid: ratio must exceed 1");
  std::vector<std::size_t> xs;
  std::size_t x = x_min;
  while (x <= x_max) {
    xs.push_back(x);
    auto next = static_cast<std::size_t>(std::ceil(static_cast<double>(x) * ratio));
    x = next > x ? next : x + 1;
  }
  if (xs.back() != x_max) xs.push_back(x_max);
  return xs;
}

namespace {

ExponentProfile finish(ExponentProfile p, double epsilon, std::string name) {
  p.epsilon = epsilon;
  // Capped below 1 so profiles with an unattainable threshold still carry a
  // usable window exponent (they stay valid() == false).
  p.r = std::min(p.threshold() + epsilon, 1.0 - epsilon);
  p.preset_name = std::move(name);
  return p;
}

ExponentProfile make_gl2_selfdual(double epsilon) {
  ExponentProfile p;
  p.alpha = 7.0 / 64.0;
  p.beta = 71.0 / 192.0;
  p.gamma = 3.0 / 5.0;
  return finish(p, epsilon, "gl2-selfdual");
}

ExponentProfile make_glm(int m, double epsilon) {
  if (m < 2) raise(errc::invalid_argument, "glm preset: m must be >= 2");
  double md = m;
  ExponentProfile p;
  p.alpha = m == 3 ? 5.0 / 14.0 : 0.5 - 1.0 / (md * md + 1.0);
  p.beta = (md * md - md) / (md * md + 1.0);
  p.gamma = (md * md - 1.0) / (md * md + 1.0);
  return finish(p, epsilon, "glm(" + std::to_string(m) + ")");
}

ExponentProfile make_glm_ramanujan(int m, double epsilon) {
  if (m < 2) raise(errc::invalid_argument, "glm-ramanujan preset: m must be >= 2");
  double md = m;
  ExponentProfile p;
  p.alpha = 0.0;
  p.beta = (md * md - md) / (md * md + 1.0);
  p.gamma = (md * md - 1.0) / (md * md + 1.0);
  return finish(p, epsilon, "glm-ramanujan(" + std::to_string(m) + ")");
}

ExponentProfile make_siegel_spinor(double epsilon) {
  ExponentProfile p;
  p.alpha = 0.0;
  p.beta = 3.0 / 5.0;
  p.gamma = 41.0 / 47.0;
  return finish(p, epsilon, "siegel-spinor");
}

std::optional<int> parse_arity(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() + 1 || name.substr(0, prefix.size()) != prefix ||
      name[prefix.size()] != '(' || name.back() != ')')
    return std::nullopt;
  std::string_view digits = name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
  int m = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), m);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return m;
}

} // namespace

std::map<std::string, ExponentProfile> preset_profiles(double epsilon) {
  std::map<std::string, ExponentProfile> out;
  auto add = [&](ExponentProfile p) {
    std::string name = p.preset_name;
    out.emplace(std::move(name), std::move(p));
  };
  add(make_gl2_selfdual(epsilon));
  // glm(m) for m >= 4 has alpha + beta > 1: the criterion hypotheses fail, so
  // no valid preset exists (still reachable by name, flagged invalid).
  add(make_glm(2, epsilon));
  add(make_glm(3, epsilon));
  for (int m = 2; m <= 6; ++m) add(make_glm_ramanujan(m, epsilon));
  add(make_siegel_spinor(epsilon));
  return out;
}

ExponentProfile preset_profile(std::string_view name, double epsilon) {
  if (name == "gl2-selfdual") return make_gl2_selfdual(epsilon);
  if (name == "siegel-spinor") return make_siegel_spinor(epsilon);
  if (auto m = parse_arity(name, "glm")) return make_glm(*m, epsilon);
  if (auto m = parse_arity(name, "glm-ramanujan")) return make_glm_ramanujan(*m, epsilon);
  raise(errc::invalid_argument,
        "unknown preset '" + std::string(name) +
            "'; available: gl2-selfdual, glm(m), glm-ramanujan(m), siegel-spinor");
}

void write_windows_csv(const WindowReport& report, std::ostream& os) {
  os << "x,window_len,changes,gap_fraction\n";
  char buf[64];
  for (const WindowRow& row : report.windows) {
    std::snprintf(buf, sizeof buf, "%.17g", row.gap_fraction);
    os << row.x << ',' << row.window_len << ',' << row.changes << ',' << buf << '\n';
  }
}

void write_cumulative_csv(const WindowReport& report, std::ostream& os) {
  os << "x,cumulative\n";
  for (const CumulativeRow& row : report.cumulative)
    os << row.x << ',' << row.cumulative << '\n';
}

} // namespace lfosc::oscillate
