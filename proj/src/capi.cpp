#include "lfosc.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>

#include "lfosc/error.hpp"
#include "lfosc/euler.hpp"
#include "lfosc/experiment.hpp"
#include "lfosc/gl2.hpp"
#include "lfosc/oscillate.hpp"
#include "lfosc/series.hpp"
#include "lfosc/siegel.hpp"

struct lfosc_series {
  lfosc::CoefficientSeries impl;
};
struct lfosc_satake {
  lfosc::euler::SatakeData impl;
};
struct lfosc_report {
  lfosc::oscillate::WindowReport impl;
};

namespace {

thread_local std::string tl_error;

int code_of(lfosc::errc e) {
  using lfosc::errc;
  switch (e) {
    case errc::ok: return LFOSC_OK;
    case errc::invalid_argument: return LFOSC_E_INVALID_ARGUMENT;
    case errc::precondition: return LFOSC_E_PRECONDITION;
    case errc::parse_error: return LFOSC_E_PARSE;
    case errc::data_error: return LFOSC_E_DATA;
    case errc::range_error: return LFOSC_E_RANGE;
    case errc::io_error: return LFOSC_E_IO;
    case errc::insufficient_data: return LFOSC_E_INSUFFICIENT_DATA;
    case errc::check_failed: return LFOSC_E_CHECK_FAILED;
    case errc::internal: return LFOSC_E_INTERNAL;
  }
  return LFOSC_E_INTERNAL;
}

template <class F>
int guard(F&& f) {
  try {
    f();
    tl_error.clear();
    return LFOSC_OK;
  } catch (const lfosc::Error& e) {
    tl_error = e.what();
    return code_of(e.code());
  } catch (const std::exception& e) {
    tl_error = e.what();
    return LFOSC_E_INTERNAL;
  }
}

int bad_argument(const char* what) {
  tl_error = what;
  return LFOSC_E_INVALID_ARGUMENT;
}

lfosc::euler::SynthModel parse_model_or_throw(const char* model) {
  auto parsed = lfosc::euler::parse_model(model ? model : "");
  if (!parsed)
    lfosc::raise(lfosc::errc::invalid_argument,
                 std::string("unknown model '") + (model ? model : "") + "'");
  return *parsed;
}

lfosc::oscillate::ExponentProfile to_profile(const lfosc_profile& p) {
  lfosc::oscillate::ExponentProfile out;
  out.alpha = p.alpha;
  out.beta = p.beta;
  out.gamma = p.gamma;
  out.r = p.r;
  out.epsilon = p.epsilon;
  out.preset_name = "capi";
  return out;
}

lfosc_fit to_fit(const lfosc::oscillate::MomentFit& fit) {
  lfosc_fit out;
  out.slope = fit.slope;
  out.exponent = fit.exponent;
  out.exponent_stderr = fit.exponent_stderr;
  out.residual_exponent = fit.residual_exponent;
  out.flagged = fit.flagged ? 1 : 0;
  return out;
}

int report_csv_to_file(const lfosc_report* r, const char* path, bool windows) {
  if (!r || !path) return bad_argument("null argument");
  return guard([&] {
    std::ostringstream os;
    if (windows)
      lfosc::oscillate::write_windows_csv(r->impl, os);
    else
      lfosc::oscillate::write_cumulative_csv(r->impl, os);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) lfosc::raise(lfosc::errc::io_error, std::string("cannot open ") + path);
    file << os.str();
    file.flush();
    if (!file) lfosc::raise(lfosc::errc::io_error, std::string("write failed: ") + path);
  });
}

} // namespace

extern "C" {

const char* lfosc_version(void) { return "0.1.0"; }

const char* lfosc_last_error(void) { return tl_error.c_str(); }

void lfosc_string_free(char* s) { std::free(s); }

int lfosc_series_delta(size_t n, lfosc_series** out) {
  if (!out) return bad_argument("out is null");
  return guard([&] {
    auto f = lfosc::gl2::delta_q_expansion(n);
    *out = new lfosc_series{lfosc::gl2::normalized_series(f)};
  });
}

int lfosc_series_sym_power(size_t n, int j, lfosc_series** out) {
  if (!out) return bad_argument("out is null");
  return guard([&] {
    auto f = lfosc::gl2::delta_q_expansion(n);
    *out = new lfosc_series{lfosc::gl2::symmetric_power_series(f, j, n)};
  });
}

int lfosc_series_synthetic(size_t n, int m, const char* model, uint64_t seed,
                           lfosc_series** out) {
  if (!out) return bad_argument("out is null");
  return guard([&] {
    auto data = lfosc::euler::synth_satake(m, n, parse_model_or_throw(model), seed);
    *out = new lfosc_series{lfosc::euler::assemble_series(data, n)};
  });
}

int lfosc_series_spinor_synthetic(size_t n, uint64_t seed, int normalized,
                                  lfosc_series** out) {
  if (!out) return bad_argument("out is null");
  return guard([&] {
    auto af = lfosc::siegel::spinor_series(lfosc::siegel::synth_triples(n, seed), n);
    *out = new lfosc_series{normalized ? lfosc::siegel::normalized_eigenvalues(af)
                                       : std::move(af)};
  });
}

int lfosc_series_spinor_ingest(const char* path, int expected_weight, lfosc_series** out) {
  if (!out) return bad_argument("out is null");
  if (!path) return bad_argument("path is null");
  return guard([&] {
    auto data = expected_weight < 0
                    ? lfosc::siegel::ingest_eigenvalues(path)
                    : lfosc::siegel::ingest_eigenvalues(path, expected_weight);
    *out = new lfosc_series{data.normalized_series()};
  });
}

int lfosc_series_limit(const lfosc_series* s, size_t* out) {
  if (!s || !out) return bad_argument("null argument");
  *out = s->impl.limit();
  return LFOSC_OK;
}

int lfosc_series_value(const lfosc_series* s, size_t n, double* out) {
  if (!s || !out) return bad_argument("null argument");
  return guard([&] { *out = s->impl.value(n); });
}

int lfosc_series_present(const lfosc_series* s, size_t n, int* out) {
  if (!s || !out) return bad_argument("null argument");
  return guard([&] { *out = s->impl.present(n) ? 1 : 0; });
}

int lfosc_series_values(const lfosc_series* s, size_t lo, size_t hi, double* out) {
  if (!s || !out) return bad_argument("null argument");
  if (lo < 1 || lo > hi) return bad_argument("need 1 <= lo <= hi");
  return guard([&] {
    for (size_t n = lo; n <= hi; ++n) out[n - lo] = s->impl.value(n);
  });
}

void lfosc_series_free(lfosc_series* s) { delete s; }

int lfosc_satake_synth(int m, size_t n, const char* model, uint64_t seed,
                       lfosc_satake** out) {
  if (!out) return bad_argument("out is null");
  return guard([&] {
    *out = new lfosc_satake{
        lfosc::euler::synth_satake(m, n, parse_model_or_throw(model), seed)};
  });
}

int lfosc_satake_read(const char* path, lfosc_satake** out) {
  if (!out || !path) return bad_argument("null argument");
  return guard([&] { *out = new lfosc_satake{lfosc::euler::read_satake_file(path)}; });
}

int lfosc_satake_write(const lfosc_satake* s, const char* path) {
  if (!s || !path) return bad_argument("null argument");
  return guard([&] { lfosc::euler::write_satake_file(s->impl, path); });
}

int lfosc_satake_degree(const lfosc_satake* s, int* out) {
  if (!s || !out) return bad_argument("null argument");
  *out = s->impl.degree;
  return LFOSC_OK;
}

int lfosc_satake_assemble(const lfosc_satake* s, size_t n, lfosc_series** out) {
  if (!s || !out) return bad_argument("null argument");
  return guard([&] { *out = new lfosc_series{lfosc::euler::assemble_series(s->impl, n)}; });
}

int lfosc_satake_rankin_self(const lfosc_satake* s, lfosc_satake** out) {
  if (!s || !out) return bad_argument("null argument");
  return guard([&] {
    *out = new lfosc_satake{lfosc::euler::rankin_selberg_data(
        s->impl, lfosc::euler::contragredient(s->impl))};
  });
}

void lfosc_satake_free(lfosc_satake* s) { delete s; }

int lfosc_preset_profile(const char* name, double epsilon, lfosc_profile* out) {
  if (!name || !out) return bad_argument("null argument");
  return guard([&] {
    auto p = lfosc::oscillate::preset_profile(name, epsilon);
    out->alpha = p.alpha;
    out->beta = p.beta;
    out->gamma = p.gamma;
    out->r = p.r;
    out->epsilon = p.epsilon;
    out->valid = p.valid() ? 1 : 0;
  });
}

int lfosc_presets_table(char** out) {
  if (!out) return bad_argument("out is null");
  return guard([&] {
    std::ostringstream os;
    lfosc::experiment::print_presets(os);
    std::string text = os.str();
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) lfosc::raise(lfosc::errc::internal, "out of memory");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

int lfosc_sign_changes_window(const lfosc_series* s, size_t x, double r, size_t* out) {
  if (!s || !out) return bad_argument("null argument");
  return guard([&] { *out = lfosc::oscillate::sign_changes_window(s->impl, x, r); });
}

int lfosc_scan_windows(const lfosc_series* s, const lfosc_profile* profile, size_t x_min,
                       size_t x_max, double ratio, lfosc_report** out) {
  if (!s || !profile || !out) return bad_argument("null argument");
  return guard([&] {
    *out = new lfosc_report{
        lfosc::oscillate::scan_windows(s->impl, to_profile(*profile), x_min, x_max, ratio)};
  });
}

int lfosc_report_window_count(const lfosc_report* r, size_t* out) {
  if (!r || !out) return bad_argument("null argument");
  *out = r->impl.windows.size();
  return LFOSC_OK;
}

int lfosc_report_fraction_with_change(const lfosc_report* r, double* out) {
  if (!r || !out) return bad_argument("null argument");
  *out = r->impl.fraction_with_change;
  return LFOSC_OK;
}

int lfosc_report_x0(const lfosc_report* r, size_t* x0, int* has) {
  if (!r || !x0 || !has) return bad_argument("null argument");
  *has = r->impl.all_changes_from_x ? 1 : 0;
  *x0 = r->impl.all_changes_from_x.value_or(0);
  return LFOSC_OK;
}

int lfosc_report_cumulative_exponent(const lfosc_report* r, double* exponent, int* has) {
  if (!r || !exponent || !has) return bad_argument("null argument");
  *has = r->impl.cumulative_exponent ? 1 : 0;
  *exponent = r->impl.cumulative_exponent.value_or(0.0);
  return LFOSC_OK;
}

int lfosc_report_write_windows_csv(const lfosc_report* r, const char* path) {
  return report_csv_to_file(r, path, true);
}

int lfosc_report_write_cumulative_csv(const lfosc_report* r, const char* path) {
  return report_csv_to_file(r, path, false);
}

void lfosc_report_free(lfosc_report* r) { delete r; }

int lfosc_fit_growth(const double* xs, const double* values, size_t count,
                     int sup_envelope, lfosc_fit* out) {
  if (!xs || !values || !out) return bad_argument("null argument");
  return guard([&] {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(count);
    for (size_t i = 0; i < count; ++i) pts.emplace_back(xs[i], values[i]);
    *out = to_fit(lfosc::oscillate::fit_growth_exponent(
        pts, sup_envelope ? lfosc::oscillate::FitMode::SupEnvelope
                          : lfosc::oscillate::FitMode::Direct));
  });
}

int lfosc_second_moment_fit(const lfosc_series* s, const size_t* xs, size_t count,
                            lfosc_fit* out) {
  if (!s || !xs || !out) return bad_argument("null argument");
  return guard([&] {
    std::vector<size_t> points(xs, xs + count);
    *out = to_fit(lfosc::oscillate::second_moment_fit(s->impl, points));
  });
}

int lfosc_linear_moment_fit(const lfosc_series* s, const size_t* xs, size_t count,
                            lfosc_fit* out) {
  if (!s || !xs || !out) return bad_argument("null argument");
  return guard([&] {
    std::vector<size_t> points(xs, xs + count);
    *out = to_fit(lfosc::oscillate::linear_moment_fit(s->impl, points));
  });
}

int lfosc_run_config(const char* config_path, const char* const* overrides,
                     size_t n_overrides, int* run_exit) {
  if (!config_path || !run_exit) return bad_argument("null argument");
  if (n_overrides > 0 && !overrides) return bad_argument("overrides is null");
  return guard([&] {
    auto config = lfosc::experiment::parse_config(config_path);
    for (size_t i = 0; i < n_overrides; ++i)
      lfosc::experiment::apply_override(config, overrides[i]);
    *run_exit = lfosc::experiment::run(config).exit_code;
  });
}

int lfosc_selfcheck(int* failures) {
  if (!failures) return bad_argument("failures is null");
  return guard([&] { *failures = lfosc::experiment::selfcheck(std::cout); });
}

} // extern "C"
