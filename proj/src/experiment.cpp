#include "lfosc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "lfosc/arith.hpp"
#include "lfosc/error.hpp"
#include "lfosc/gl2.hpp"
#include "lfosc/siegel.hpp"

namespace lfosc::experiment {

using nlohmann::ordered_json;

const char* to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Delta: return "delta";
    case SourceKind::SymPower: return "symk";
    case SourceKind::Synthetic: return "synthetic";
    case SourceKind::SpinorSynthetic: return "spinor-synthetic";
    case SourceKind::SpinorIngest: return "spinor-ingest";
  }
  return "?";
}

const char* to_string(Task task) {
  switch (task) {
    case Task::Windows: return "windows";
    case Task::Cumulative: return "cumulative";
    case Task::Moments: return "moments";
    case Task::RankinCheck: return "rankin-check";
    case Task::DivisorBoundCheck: return "divisor-bound-check";
  }
  return "?";
}

namespace {

constexpr double kCheckTolerance = 1e-9;
constexpr double kExponentSlack = 0.05;

struct Location {
  std::string origin;
  std::size_t line = 0; // 0 for command-line overrides
};

[[noreturn]] void fail(const Location& loc, const std::string& what) {
  std::string where = loc.origin;
  if (loc.line > 0) where += ":" + std::to_string(loc.line);
  raise(errc::parse_error, where + ": " + what);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const Location& loc, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(loc, "bad numeric value for " + key + ": '" + v + "'");
  }
}

std::uint64_t parse_unsigned(const Location& loc, const std::string& key,
                             const std::string& v) {
  if (v.empty() || v[0] == '-') fail(loc, key + " must be a nonnegative integer");
  try {
    std::size_t pos = 0;
    std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(loc, "bad integer value for " + key + ": '" + v + "'");
  }
}

Task parse_task(const Location& loc, const std::string& name) {
  if (name == "windows") return Task::Windows;
  if (name == "cumulative") return Task::Cumulative;
  if (name == "moments") return Task::Moments;
  if (name == "rankin-check") return Task::RankinCheck;
  if (name == "divisor-bound-check") return Task::DivisorBoundCheck;
  fail(loc, "unknown task '" + name +
                "' (expected windows, cumulative, moments, rankin-check, "
                "divisor-bound-check)");
}

void apply_kv(ExperimentConfig& c, const Location& loc, const std::string& key,
              const std::string& value) {
  if (key == "source") {
    if (value == "delta")
      c.source = SourceKind::Delta;
    else if (value == "symk")
      c.source = SourceKind::SymPower;
    else if (value == "synthetic")
      c.source = SourceKind::Synthetic;
    else if (value == "spinor-synthetic")
      c.source = SourceKind::SpinorSynthetic;
    else if (value == "spinor-ingest")
      c.source = SourceKind::SpinorIngest;
    else
      fail(loc, "unknown source '" + value +
                    "' (expected delta, symk, synthetic, spinor-synthetic, "
                    "spinor-ingest)");
  } else if (key == "j") {
    c.sym_j = static_cast<int>(parse_unsigned(loc, key, value));
  } else if (key == "m") {
    c.gl_m = static_cast<int>(parse_unsigned(loc, key, value));
  } else if (key == "model") {
    auto model = euler::parse_model(value);
    if (!model)
      fail(loc, "unknown model '" + value +
                    "' (expected ramanujan-uniform, sato-tate, lrs-extremal)");
    c.model = *model;
  } else if (key == "seed") {
    c.seed = parse_unsigned(loc, key, value);
  } else if (key == "path") {
    c.ingest_path = value;
  } else if (key == "weight") {
    c.ingest_weight = static_cast<int>(parse_unsigned(loc, key, value));
  } else if (key == "N") {
    c.n = parse_unsigned(loc, key, value);
  } else if (key == "preset") {
    c.preset = value;
  } else if (key == "alpha") {
    c.alpha = parse_double(loc, key, value);
  } else if (key == "beta") {
    c.beta = parse_double(loc, key, value);
  } else if (key == "gamma") {
    c.gamma = parse_double(loc, key, value);
  } else if (key == "r") {
    c.r = parse_double(loc, key, value);
  } else if (key == "epsilon") {
    c.epsilon = parse_double(loc, key, value);
  } else if (key == "outputs") {
    c.outputs = value;
  } else if (key == "tasks") {
    c.tasks.clear();
    std::istringstream ts(value);
    std::string item;
    while (std::getline(ts, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.tasks.push_back(parse_task(loc, item));
    }
  } else if (key == "label") {
    c.label = value;
  } else if (key == "x_min") {
    c.x_min = parse_unsigned(loc, key, value);
  } else if (key == "x_max") {
    c.x_max = parse_unsigned(loc, key, value);
  } else if (key == "ratio") {
    c.ratio = parse_double(loc, key, value);
  } else if (key == "x0_max") {
    c.x0_max = parse_unsigned(loc, key, value);
  } else {
    fail(loc, "unknown key '" + key + "'");
  }
}

bool has_task(const std::vector<Task>& tasks, Task t) {
  return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

std::vector<Task> canonical_tasks(const std::vector<Task>& requested) {
  std::vector<Task> out;
  for (Task t : {Task::Windows, Task::Cumulative, Task::Moments, Task::RankinCheck,
                 Task::DivisorBoundCheck})
    if (has_task(requested, t)) out.push_back(t);
  return out;
}

std::string derived_label(const ExperimentConfig& c) {
  switch (c.source) {
    case SourceKind::Delta: return "delta";
    case SourceKind::SymPower: return "sym" + std::to_string(c.sym_j) + "-delta";
    case SourceKind::Synthetic:
      return "gl" + std::to_string(c.gl_m) + "-" + euler::to_string(c.model) + "-s" +
             std::to_string(c.seed);
    case SourceKind::SpinorSynthetic: return "spinor-s" + std::to_string(c.seed);
    case SourceKind::SpinorIngest: {
      std::string stem = std::filesystem::path(c.ingest_path).stem().string();
      return stem.empty() ? "spinor-ingest" : "spinor-" + stem;
    }
  }
  return "experiment";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Everything the tasks need from the generated sequence.
struct SourceData {
  CoefficientSeries seq; // the (normalized) real sequence that gets scanned
  std::optional<euler::SatakeData> satake; // Euler-product sources only
  std::optional<CoefficientSeries> spinor_af; // spinor-synthetic: raw a_F
  int rs_degree = 0; // degree m for the Rankin-Selberg residual bound
};

SourceData build_source(const ExperimentConfig& c) {
  switch (c.source) {
    case SourceKind::Delta: {
      gl2::EigenformSeries f = gl2::delta_q_expansion(c.n);
      return {gl2::normalized_series(f), gl2::satake_angles(f, c.n), std::nullopt, 2};
    }
    case SourceKind::SymPower: {
      gl2::EigenformSeries f = gl2::delta_q_expansion(c.n);
      euler::SatakeData data = gl2::symmetric_power_data(f, c.sym_j, c.n);
      CoefficientSeries seq = euler::assemble_series(data, c.n);
      return {std::move(seq), std::move(data), std::nullopt, c.sym_j + 1};
    }
    case SourceKind::Synthetic: {
      euler::SatakeData data = euler::synth_satake(c.gl_m, c.n, c.model, c.seed);
      CoefficientSeries seq = euler::assemble_series(data, c.n);
      return {std::move(seq), std::move(data), std::nullopt, c.gl_m};
    }
    case SourceKind::SpinorSynthetic: {
      CoefficientSeries af = siegel::spinor_series(siegel::synth_triples(c.n, c.seed), c.n);
      CoefficientSeries lam = siegel::normalized_eigenvalues(af);
      return {std::move(lam), std::nullopt, std::move(af), 0};
    }
    case SourceKind::SpinorIngest: {
      siegel::SiegelEigenData data =
          c.ingest_weight ? siegel::ingest_eigenvalues(c.ingest_path, *c.ingest_weight)
                          : siegel::ingest_eigenvalues(c.ingest_path);
      return {data.normalized_series(), std::nullopt, std::nullopt, 0};
    }
  }
  raise(errc::internal, "unreachable source kind");
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) raise(errc::io_error, "cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) raise(errc::io_error, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    raise(errc::io_error, "rename to " + path.string() + " failed: " + ec.message());
}

std::size_t resolve_scan_bound(const ExperimentConfig& c,
                               const oscillate::ExponentProfile& profile,
                               std::size_t limit) {
  double r = profile.r;
  if (!(r > 0.0 && r < 1.0))
    raise(errc::invalid_argument,
          "window exponent r = " + fmt(r) + " not in (0, 1); no window scan possible");
  auto fits = [&](std::size_t x) {
    auto len = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(x), r)));
    return x <= limit && limit - x >= len;
  };
  if (!fits(1))
    raise(errc::invalid_argument,
          "series limit " + std::to_string(limit) + " too small for any window");
  std::size_t lo = 1, hi = limit;
  while (lo < hi) { // largest x with x + ceil(x^r) <= limit
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  std::size_t auto_max = lo;
  std::size_t chosen = auto_max;
  if (c.x_max) {
    if (*c.x_max > auto_max)
      raise(errc::invalid_argument,
            "x_max = " + std::to_string(*c.x_max) + " exceeds the largest window start " +
                std::to_string(auto_max) + " admissible for limit " + std::to_string(limit));
    chosen = *c.x_max;
  }
  if (c.x_min > chosen)
    raise(errc::invalid_argument, "x_min = " + std::to_string(c.x_min) +
                                      " exceeds the scan bound " + std::to_string(chosen));
  return chosen;
}

ordered_json profile_json(const oscillate::ExponentProfile& p) {
  ordered_json j;
  j["preset"] = p.preset_name;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["r"] = p.r;
  j["epsilon"] = p.epsilon;
  j["threshold"] = p.threshold();
  j["valid"] = p.valid();
  return j;
}

ordered_json source_json(const ExperimentConfig& c, std::size_t limit) {
  ordered_json j;
  j["kind"] = to_string(c.source);
  j["n"] = c.n;
  if (limit != c.n) j["limit"] = limit;
  switch (c.source) {
    case SourceKind::SymPower: j["j"] = c.sym_j; break;
    case SourceKind::Synthetic:
      j["m"] = c.gl_m;
      j["model"] = euler::to_string(c.model);
      j["seed"] = c.seed;
      break;
    case SourceKind::SpinorSynthetic: j["seed"] = c.seed; break;
    case SourceKind::SpinorIngest:
      j["path"] = c.ingest_path;
      if (c.ingest_weight) j["weight"] = *c.ingest_weight;
      break;
    default: break;
  }
  return j;
}

struct TaskResult {
  ordered_json details;
  bool pass = false;
  std::string csv_name;
  std::string csv_content;
};

TaskResult windows_task(const oscillate::WindowReport& report, const ExperimentConfig& c,
                        const std::string& label) {
  TaskResult t;
  t.pass = report.all_changes_from_x.has_value() &&
           (!c.x0_max || *report.all_changes_from_x <= *c.x0_max);
  t.details["windows"] = report.windows.size();
  t.details["fraction_with_change"] = report.fraction_with_change;
  if (report.all_changes_from_x)
    t.details["x0"] = *report.all_changes_from_x;
  else
    t.details["x0"] = nullptr;
  if (c.x0_max) t.details["x0_required_max"] = *c.x0_max;
  t.details["pass"] = t.pass;
  std::ostringstream os;
  oscillate::write_windows_csv(report, os);
  t.csv_name = label + "-windows.csv";
  t.csv_content = os.str();
  return t;
}

TaskResult cumulative_task(const oscillate::WindowReport& report, const std::string& label) {
  TaskResult t;
  double target = (1.0 - report.profile.r) - kExponentSlack;
  t.pass = report.cumulative_exponent && *report.cumulative_exponent >= target;
  t.details["final_count"] =
      report.cumulative.empty() ? 0 : report.cumulative.back().cumulative;
  if (report.cumulative_exponent) {
    t.details["exponent"] = *report.cumulative_exponent;
    t.details["exponent_stderr"] = report.cumulative_exponent_stderr;
  } else {
    t.details["exponent"] = nullptr;
  }
  t.details["target_exponent"] = target;
  t.details["pass"] = t.pass;
  std::ostringstream os;
  oscillate::write_cumulative_csv(report, os);
  t.csv_name = label + "-cumulative.csv";
  t.csv_content = os.str();
  return t;
}

TaskResult moments_task(const CoefficientSeries& seq,
                        const oscillate::ExponentProfile& profile,
                        const std::string& label) {
  TaskResult t;
  std::vector<std::size_t> grid = oscillate::sample_grid(10, seq.limit(), 1.3);
  CoefficientSeries sums = oscillate::partial_sums(seq);
  std::vector<std::pair<double, double>> points;
  points.reserve(grid.size());
  for (std::size_t x : grid)
    points.emplace_back(static_cast<double>(x), sums.value(x));
  oscillate::MomentFit first = oscillate::fit_growth_exponent(points, oscillate::FitMode::SupEnvelope);
  oscillate::MomentFit second = oscillate::second_moment_fit(seq, grid);

  bool pass_beta = first.exponent <= profile.beta + kExponentSlack;
  bool pass_gamma = !second.flagged && second.slope > 0.0 &&
                    second.residual_exponent <= profile.gamma + kExponentSlack;
  t.pass = pass_beta && pass_gamma;
  t.details["partial_sum_exponent"] = first.exponent;
  t.details["partial_sum_exponent_stderr"] = first.exponent_stderr;
  t.details["beta_target"] = profile.beta + kExponentSlack;
  t.details["pass_partial_sum"] = pass_beta;
  t.details["second_moment_slope"] = second.slope;
  t.details["second_moment_residual_exponent"] = second.residual_exponent;
  t.details["gamma_target"] = profile.gamma + kExponentSlack;
  t.details["pass_second_moment"] = pass_gamma;
  if (second.flagged) t.details["second_moment_flag"] = second.flag_reason;
  t.details["pass"] = t.pass;

  std::ostringstream os;
  os << "x,partial_sum,second_moment\n";
  char buf[64];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << grid[i];
    std::snprintf(buf, sizeof buf, "%.17g", sums.value(grid[i]));
    os << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", second.sample_points[i].second);
    os << ',' << buf << '\n';
  }
  t.csv_name = label + "-moments.csv";
  t.csv_content = os.str();
  return t;
}

TaskResult rankin_task(const SourceData& src, const std::string& label) {
  TaskResult t;
  const euler::SatakeData& data = *src.satake;
  std::size_t limit = src.seq.limit();
  CoefficientSeries a = euler::assemble_series(data, limit);
  CoefficientSeries rs =
      euler::assemble_series(euler::rankin_selberg_data(data, euler::contragredient(data)), limit);

  std::vector<std::pair<double, std::size_t>> slack; // (rs - a^2, n)
  slack.reserve(limit);
  std::size_t violations = 0;
  for (std::size_t n = 1; n <= limit; ++n) {
    double av = a.value(n);
    double s = rs.value(n) - av * av;
    if (s < -kCheckTolerance) ++violations;
    slack.emplace_back(s, n);
  }
  double prime_max_dev = 0.0;
  for (const auto& [p, alphas] : data.per_prime) {
    if (p > limit) break;
    double av = a.value(p);
    prime_max_dev = std::max(prime_max_dev, std::abs(rs.value(p) - av * av));
  }
  oscillate::MomentFit fit =
      oscillate::linear_moment_fit(rs, oscillate::sample_grid(10, limit, 1.3));
  double md = src.rs_degree;
  double rs_gamma = (md * md - 1.0) / (md * md + 1.0);

  bool pass_ineq = violations == 0;
  bool pass_primes = prime_max_dev <= kCheckTolerance;
  bool pass_fit = fit.slope > 0.0 && fit.residual_exponent <= rs_gamma + kExponentSlack;
  t.pass = pass_ineq && pass_primes && pass_fit;

  std::size_t keep = std::min<std::size_t>(20, slack.size());
  std::partial_sort(slack.begin(), slack.begin() + keep, slack.end());
  t.details["checked"] = limit;
  t.details["inequality_violations"] = violations;
  t.details["min_slack"] = slack.empty() ? 0.0 : slack.front().first;
  t.details["prime_identity_max_deviation"] = prime_max_dev;
  t.details["first_moment_slope"] = fit.slope;
  t.details["first_moment_residual_exponent"] = fit.residual_exponent;
  t.details["residual_target"] = rs_gamma + kExponentSlack;
  t.details["pass_inequality"] = pass_ineq;
  t.details["pass_prime_identity"] = pass_primes;
  t.details["pass_first_moment"] = pass_fit;
  t.details["pass"] = t.pass;

  std::ostringstream os;
  os << "n,a_squared,rankin_selberg,slack\n";
  char buf[64];
  for (std::size_t i = 0; i < keep; ++i) {
    auto [s, n] = slack[i];
    double av = a.value(n);
    os << n;
    std::snprintf(buf, sizeof buf, "%.17g", av * av);
    os << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", rs.value(n));
    os << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", s);
    os << ',' << buf << '\n';
  }
  t.csv_name = label + "-rankin-check.csv";
  t.csv_content = os.str();
  return t;
}

TaskResult divisor_task(const SourceData& src, const ExperimentConfig& c,
                        const std::string& label) {
  TaskResult t;
  std::size_t limit = src.seq.limit();

  struct Family {
    std::string name;
    const CoefficientSeries* values;
    int divisor_order;
    double power; // extra n^power factor on the bound
  };
  std::vector<Family> families;
  switch (c.source) {
    case SourceKind::Delta:
      families.push_back({"lambda", &src.seq, 2, 0.0});
      break;
    case SourceKind::SymPower:
      families.push_back({"sym" + std::to_string(c.sym_j), &src.seq, c.sym_j + 1, 0.0});
      break;
    case SourceKind::Synthetic:
      families.push_back({"a", &src.seq, c.gl_m, src.satake->ramanujan_exponent});
      break;
    case SourceKind::SpinorSynthetic:
      families.push_back({"a_F", &*src.spinor_af, 4, 0.0});
      families.push_back({"lambda", &src.seq, 5, 0.0});
      break;
    case SourceKind::SpinorIngest:
      families.push_back({"lambda", &src.seq, 5, 0.0});
      break;
  }

  struct Row {
    double slack;
    std::size_t n;
    std::size_t family;
    double value, bound;
  };
  std::vector<Row> rows;
  rows.reserve(limit * families.size());
  std::size_t violations = 0;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const Family& fam = families[fi];
    CoefficientSeries bound = arith::divisor_function(fam.divisor_order, limit);
    for (std::size_t n = 1; n <= limit; ++n) {
      if (!fam.values->present(n)) continue;
      double v = std::abs(fam.values->value(n));
      double b = bound.value(n);
      if (fam.power != 0.0) b *= std::pow(static_cast<double>(n), fam.power);
      double s = b - v;
      if (s < -kCheckTolerance) ++violations;
      rows.push_back({s, n, fi, v, b});
    }
  }
  std::size_t keep = std::min<std::size_t>(20, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + keep, rows.end(),
                    [](const Row& a, const Row& b) {
                      return a.slack != b.slack ? a.slack < b.slack
                             : a.n != b.n       ? a.n < b.n
                                                : a.family < b.family;
                    });
  t.pass = violations == 0;
  t.details["checked"] = rows.size();
  t.details["violations"] = violations;
  t.details["min_slack"] = rows.empty() ? 0.0 : rows.front().slack;
  ordered_json fam_names = ordered_json::array();
  for (const Family& fam : families)
    fam_names.push_back(fam.name + " <= d_" + std::to_string(fam.divisor_order) +
                        (fam.power != 0.0 ? "(n) * n^" + fmt(fam.power) : "(n)"));
  t.details["bounds"] = fam_names;
  t.details["pass"] = t.pass;

  std::ostringstream os;
  os << "series,n,value,bound,slack\n";
  char buf[64];
  for (std::size_t i = 0; i < keep; ++i) {
    const Row& row = rows[i];
    os << families[row.family].name << ',' << row.n;
    std::snprintf(buf, sizeof buf, "%.17g", row.value);
    os << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", row.bound);
    os << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", row.slack);
    os << ',' << buf << '\n';
  }
  t.csv_name = label + "-divisor-bound-check.csv";
  t.csv_content = os.str();
  return t;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      fail({origin, lineno}, "expected key=value, got '" + body + "'");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) fail({origin, lineno}, "empty key");
    apply_kv(c, {origin, lineno}, key, value);
  }
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) raise(errc::io_error, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    raise(errc::invalid_argument, "override '" + assignment + "' is not key=value");
  std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  apply_kv(config, {"override", 0}, key, value);
}

ResolvedPlan validate(const ExperimentConfig& config) {
  if (config.n == 0) raise(errc::invalid_argument, "N must be >= 1");
  switch (config.source) {
    case SourceKind::SymPower:
      if (config.sym_j < 1)
        raise(errc::invalid_argument, "symk source: j must be >= 1");
      break;
    case SourceKind::Synthetic:
      if (config.gl_m < 2)
        raise(errc::invalid_argument, "synthetic source: m must be >= 2");
      if (config.model == euler::SynthModel::SatoTate && config.gl_m != 2)
        raise(errc::invalid_argument, "sato-tate model requires m = 2");
      break;
    case SourceKind::SpinorIngest:
      if (config.ingest_path.empty())
        raise(errc::invalid_argument, "spinor-ingest source requires path=");
      break;
    default: break;
  }

  bool fitting = has_task(config.tasks, Task::Moments) ||
                 has_task(config.tasks, Task::RankinCheck) ||
                 has_task(config.tasks, Task::Cumulative);
  if (fitting && config.n < 1000)
    raise(errc::invalid_argument,
          "N must be >= 1000 when fitting tasks are requested (fits need >= 8 "
          "geometric sample points)");
  if (has_task(config.tasks, Task::RankinCheck) &&
      (config.source == SourceKind::SpinorSynthetic ||
       config.source == SourceKind::SpinorIngest))
    raise(errc::invalid_argument,
          "rankin-check needs per-prime Satake data; spinor sources are not supported");

  ResolvedPlan plan;
  oscillate::ExponentProfile p;
  if (!config.preset.empty()) {
    p = oscillate::preset_profile(config.preset, config.epsilon);
  } else {
    if (!(config.alpha && config.beta && config.gamma && config.r))
      raise(errc::invalid_argument,
            "explicit profile requires alpha=, beta=, gamma=, r= (or set preset=)");
    p.preset_name = "explicit";
  }
  p.epsilon = config.epsilon;
  if (config.alpha) p.alpha = *config.alpha;
  if (config.beta) p.beta = *config.beta;
  if (config.gamma) p.gamma = *config.gamma;
  if (config.r) p.r = *config.r;

  if (config.r && !p.valid())
    raise(errc::invalid_argument,
          "r = " + fmt(p.r) + " outside the admissible interval (max{alpha+beta, gamma}, 1) = (" +
              fmt(p.threshold()) + ", 1)");
  plan.advisory = !p.valid();
  if (plan.advisory)
    plan.advisory_reason = "profile '" + p.preset_name +
                           "' fails the criterion predicate (alpha+beta = " +
                           fmt(p.alpha + p.beta) + ", threshold = " + fmt(p.threshold()) +
                           ", r = " + fmt(p.r) + ")";
  plan.profile = std::move(p);
  plan.label = config.label.empty() ? derived_label(config) : config.label;
  return plan;
}

RunResult run(const ExperimentConfig& config) {
  ResolvedPlan plan = validate(config);
  RunResult result;
  result.advisory = plan.advisory;
  std::vector<Task> tasks = canonical_tasks(config.tasks);
  if (tasks.empty()) return result;

  SourceData src = build_source(config);
  std::size_t limit = src.seq.limit();
  bool fitting = has_task(tasks, Task::Moments) || has_task(tasks, Task::RankinCheck) ||
                 has_task(tasks, Task::Cumulative);
  if (fitting && limit < 1000)
    raise(errc::invalid_argument, "series limit " + std::to_string(limit) +
                                      " too small for fitting tasks (need >= 1000)");

  std::filesystem::path outdir(config.outputs);
  if (!outdir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec)
      raise(errc::io_error, "cannot create output directory " + outdir.string() + ": " +
                                ec.message());
  }

  ordered_json summary;
  summary["label"] = plan.label;
  summary["source"] = source_json(config, limit);
  summary["profile"] = profile_json(plan.profile);
  summary["advisory"] = plan.advisory;
  if (plan.advisory) summary["advisory_reason"] = plan.advisory_reason;

  std::optional<oscillate::WindowReport> report;
  if (has_task(tasks, Task::Windows) || has_task(tasks, Task::Cumulative)) {
    std::size_t x_max = resolve_scan_bound(config, plan.profile, limit);
    report = oscillate::scan_windows(src.seq, plan.profile, config.x_min, x_max,
                                     config.ratio);
    ordered_json scan;
    scan["x_min"] = config.x_min;
    scan["x_max"] = x_max;
    scan["ratio"] = config.ratio;
    summary["scan"] = scan;
  }

  ordered_json tasks_json = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> outputs; // name, content
  result.all_pass = true;
  for (Task task : tasks) {
    TaskResult r;
    switch (task) {
      case Task::Windows: r = windows_task(*report, config, plan.label); break;
      case Task::Cumulative: r = cumulative_task(*report, plan.label); break;
      case Task::Moments: r = moments_task(src.seq, plan.profile, plan.label); break;
      case Task::RankinCheck: r = rankin_task(src, plan.label); break;
      case Task::DivisorBoundCheck: r = divisor_task(src, config, plan.label); break;
    }
    tasks_json[to_string(task)] = std::move(r.details);
    outputs.emplace_back(std::move(r.csv_name), std::move(r.csv_content));
    result.all_pass = result.all_pass && r.pass;
  }
  summary["tasks"] = std::move(tasks_json);
  summary["overall_pass"] = result.all_pass;
  result.exit_code = (result.all_pass || plan.advisory) ? 0 : 2;
  summary["exit_code"] = result.exit_code;

  ordered_json names = ordered_json::array();
  for (const auto& [name, content] : outputs) names.push_back(name);
  std::string summary_name = plan.label + "-summary.json";
  names.push_back(summary_name);
  summary["outputs"] = std::move(names);

  for (const auto& [name, content] : outputs) {
    std::filesystem::path path = outdir / name;
    atomic_write(path, content);
    result.files.push_back(path);
  }
  result.summary_json = summary.dump(2) + "\n";
  std::filesystem::path summary_path = outdir / summary_name;
  atomic_write(summary_path, result.summary_json);
  result.files.push_back(summary_path);
  return result;
}

namespace {

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

std::string show(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

int selfcheck(std::ostream& os) {
  int failures = 0, total = 0;
  auto item = [&](const char* name, auto&& fn) {
    ++total;
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    os << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) os << ": " << detail;
    os << "\n";
    if (!ok) ++failures;
  };

  gl2::EigenformSeries delta = gl2::delta_q_expansion(100);
  auto tau = [&](std::size_t n) { return delta.exact[n]; };

  item("tau q-expansion spot values (n <= 100)", [&](std::string& d) {
    const std::pair<std::size_t, long long> expected[] = {
        {1, 1},         {2, -24},        {3, 252},  {4, -1472},
        {5, 4830},      {6, -6048},      {24, 21288960},
        {50, 611981400}, {100, 37534859200LL}};
    for (auto [n, v] : expected)
      if (tau(n) != v) {
        d = "tau(" + std::to_string(n) + ") = " + tau(n).str() + ", expected " +
            std::to_string(v);
        return false;
      }
    return true;
  });

  item("tau Hecke recurrence at prime powers", [&](std::string& d) {
    BigInt p11_2 = BigInt(1) << 11, p11_3 = BigInt(177147);
    if (tau(4) != tau(2) * tau(2) - p11_2) {
      d = "tau(4) recurrence broken";
      return false;
    }
    if (tau(8) != tau(2) * tau(4) - p11_2 * tau(2)) {
      d = "tau(8) recurrence broken";
      return false;
    }
    if (tau(9) != tau(3) * tau(3) - p11_3) {
      d = "tau(9) recurrence broken";
      return false;
    }
    return true;
  });

  item("tau multiplicativity on coprime pairs", [&](std::string& d) {
    if (tau(6) != tau(2) * tau(3) || tau(10) != tau(2) * tau(5) ||
        tau(12) != tau(3) * tau(4)) {
      d = "product mismatch among tau(6), tau(10), tau(12)";
      return false;
    }
    return true;
  });

  item("Mobius sieve values and Mertens(10) = -1", [&](std::string& d) {
    arith::SieveTables s = arith::build_sieve(12);
    const int expected[] = {0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};
    int mertens = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
      if (s.mobius[n] != expected[n]) {
        d = "mu(" + std::to_string(n) + ") = " + std::to_string(s.mobius[n]);
        return false;
      }
      if (n <= 10) mertens += s.mobius[n];
    }
    if (mertens != -1) {
      d = "Mertens(10) = " + std::to_string(mertens);
      return false;
    }
    return true;
  });

  item("divisor function tables", [&](std::string& d) {
    const struct { int l; std::size_t n; double v; } cases[] = {
        {2, 6, 4}, {4, 4, 10}, {4, 6, 16}, {5, 4, 15}, {5, 7, 5}};
    for (auto [l, n, v] : cases) {
      CoefficientSeries dl = arith::divisor_function(l, n);
      if (dl.value(n) != v) {
        d = "d_" + std::to_string(l) + "(" + std::to_string(n) + ") = " + show(dl.value(n)) +
            ", expected " + show(v);
        return false;
      }
    }
    return true;
  });

  item("geometric local factor expansion", [&](std::string& d) {
    std::vector<euler::Complex> one{1.0};
    auto c = euler::expand_local_factor(one, 3);
    for (int k = 0; k <= 3; ++k)
      if (!near(c[k].real(), 1.0) || !near(c[k].imag(), 0.0)) {
        d = "(1-X)^{-1} coefficient " + std::to_string(k) + " wrong";
        return false;
      }
    std::vector<euler::Complex> four(4, euler::Complex(1.0));
    if (!near(euler::expand_local_factor(four, 1)[1].real(), 4.0)) {
      d = "(1-X)^{-4} linear coefficient != 4";
      return false;
    }
    return true;
  });

  item("Satake angle at p = 2 for the weight-12 form", [&](std::string& d) {
    euler::SatakeData angles = gl2::satake_angles(delta, 10);
    const std::vector<euler::Complex>* a = angles.find(2);
    double expected = -24.0 / std::pow(2.0, 5.5) / 2.0; // cos(theta_2)
    if (!a || !near(a->at(0).real(), expected, 1e-12)) {
      d = "cos(theta_2) = " + show(a ? a->at(0).real() : 0.0) + ", expected " + show(expected);
      return false;
    }
    return true;
  });

  item("preset thresholds and validity", [&](std::string& d) {
    auto gl2p = oscillate::preset_profile("gl2-selfdual");
    auto siegel = oscillate::preset_profile("siegel-spinor");
    auto ram2 = oscillate::preset_profile("glm-ramanujan(2)");
    auto ram4 = oscillate::preset_profile("glm-ramanujan(4)");
    if (!near(gl2p.threshold(), 0.6, 1e-15) || !near(siegel.threshold(), 41.0 / 47.0, 1e-15) ||
        !near(ram2.threshold(), 0.6, 1e-15) || !near(ram4.threshold(), 15.0 / 17.0, 1e-15)) {
      d = "threshold table mismatch";
      return false;
    }
    if (!gl2p.valid() || !siegel.valid() || !ram2.valid() || !ram4.valid()) {
      d = "a listed preset fails the criterion predicate";
      return false;
    }
    gl2p.r = 0.59;
    if (gl2p.valid()) {
      d = "r below threshold must invalidate the profile";
      return false;
    }
    if (oscillate::preset_profile("glm(4)").valid()) {
      d = "glm(4) has alpha+beta > 1 and must be invalid";
      return false;
    }
    return true;
  });

  item("spinor beta parameter order", [&](std::string& d) {
    siegel::LocalTriple t;
    t.p = 2;
    t.alpha0 = 1.0;
    t.alpha1 = euler::Complex(0.0, 1.0);
    t.alpha2 = euler::Complex(0.0, -1.0);
    auto b = siegel::beta_parameters(t);
    bool ok = near(std::abs(b[0] - euler::Complex(1.0)), 0.0) &&
              near(std::abs(b[1] - euler::Complex(0.0, 1.0)), 0.0) &&
              near(std::abs(b[2] - euler::Complex(0.0, -1.0)), 0.0) &&
              near(std::abs(b[3] - euler::Complex(1.0)), 0.0);
    if (!ok) d = "(1, i, -i) must map to {1, i, -i, 1}";
    return ok;
  });

  item("sym^2 prime coefficient = lambda(p)^2 - 1", [&](std::string& d) {
    CoefficientSeries sym2 = gl2::symmetric_power_series(delta, 2, 20);
    for (std::size_t p : {2, 3, 5, 7}) {
      double lam = delta.normalized[p];
      if (!near(sym2.value(p), lam * lam - 1.0)) {
        d = "mismatch at p = " + std::to_string(p);
        return false;
      }
    }
    return true;
  });

  item("spinor normalization: lambda(4) = a_F(4) - 1/2", [&](std::string& d) {
    CoefficientSeries af = siegel::spinor_series(siegel::synth_triples(16, 1), 16);
    CoefficientSeries lam = siegel::normalized_eigenvalues(af);
    if (!near(lam.value(1), 1.0) || !near(lam.value(3), af.value(3)) ||
        !near(lam.value(4), af.value(4) - 0.5, 1e-12)) {
      d = "Mobius-scaled values disagree with the d^2 m = n expansion";
      return false;
    }
    return true;
  });

  item("Rankin-Selberg prime identity a(p)^2 = a_RS(p)", [&](std::string& d) {
    euler::SatakeData data =
        euler::synth_satake(2, 32, euler::SynthModel::RamanujanUniform, 1);
    CoefficientSeries a = euler::assemble_series(data, 32);
    CoefficientSeries rs = euler::assemble_series(
        euler::rankin_selberg_data(data, euler::contragredient(data)), 32);
    for (std::size_t p : {2, 3, 5, 7, 11}) {
      double av = a.value(p);
      if (!near(rs.value(p), av * av)) {
        d = "deviation at p = " + std::to_string(p);
        return false;
      }
    }
    return true;
  });

  item("Satake serialization round trip", [&](std::string& d) {
    euler::SatakeData data =
        euler::synth_satake(3, 20, euler::SynthModel::RamanujanUniform, 9);
    std::ostringstream buf;
    euler::write_satake(data, buf);
    std::istringstream in(buf.str());
    euler::SatakeData back = euler::read_satake(in);
    if (back.degree != data.degree || back.seed != data.seed ||
        back.model != data.model || back.per_prime.size() != data.per_prime.size()) {
      d = "header or prime count changed";
      return false;
    }
    for (std::size_t i = 0; i < data.per_prime.size(); ++i)
      for (int k = 0; k < data.degree; ++k)
        if (data.per_prime[i].second[k] != back.per_prime[i].second[k]) {
          d = "parameter drift at prime " + std::to_string(data.per_prime[i].first);
          return false;
        }
    return true;
  });

  if (failures == 0)
    os << "selfcheck: all " << total << " checks passed\n";
  else
    os << "selfcheck: " << failures << " of " << total << " checks FAILED\n";
  return failures;
}

void print_presets(std::ostream& os) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-18s %9s %9s %9s %10s %9s  %s\n", "preset", "alpha",
                "beta", "gamma", "threshold", "r", "valid");
  os << buf;
  for (const auto& [name, p] : oscillate::preset_profiles()) {
    std::snprintf(buf, sizeof buf, "%-18s %9.6g %9.6g %9.6g %10.6g %9.6g  %s\n",
                  name.c_str(), p.alpha, p.beta, p.gamma, p.threshold(), p.r,
                  p.valid() ? "yes" : "no");
    os << buf;
  }
  os << "\n"
        "exponent derivations (criterion: a(n) = O(n^alpha), sum a(n) = O(x^beta),\n"
        "sum a(n)^2 = c x + O(x^gamma); windows [x, x + x^r] need\n"
        "max{alpha+beta, gamma} < r < 1, and r is placed epsilon above that threshold):\n"
        "  gl2-selfdual       self-dual degree-2 eigenform: coefficient exponent 7/64,\n"
        "                     partial sums O(x^(71/192)), second moment residual\n"
        "                     O(x^(3/5)); threshold 3/5\n"
        "  glm(m)             degree-m unitary series: coefficient exponent\n"
        "                     1/2 - 1/(m^2+1) (5/14 at m = 3), partial sums\n"
        "                     O(x^((m^2-m)/(m^2+1))), second moment residual\n"
        "                     O(x^((m^2-1)/(m^2+1))); only m = 2, 3 satisfy\n"
        "                     alpha + beta < 1\n"
        "  glm-ramanujan(m)   degree-m with unit-modulus local parameters:\n"
        "                     coefficients O(n^epsilon), threshold (m^2-1)/(m^2+1)\n"
        "  siegel-spinor      genus-2 spinor eigenvalues: |lambda(n)| <= d_5(n),\n"
        "                     partial sums O(x^(3/5)), second moment residual\n"
        "                     O(x^(41/47)); threshold 41/47\n";
}

} // namespace lfosc::experiment
