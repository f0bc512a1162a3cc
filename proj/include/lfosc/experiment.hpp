#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lfosc/euler.hpp"
#include "lfosc/oscillate.hpp"

namespace lfosc::experiment {

enum class SourceKind { Delta, SymPower, Synthetic, SpinorSynthetic, SpinorIngest };
const char* to_string(SourceKind kind);

enum class Task { Windows, Cumulative, Moments, RankinCheck, DivisorBoundCheck };
const char* to_string(Task task);

/// Declarative experiment description, read from flat key=value text.
/// Keys: source, j, m, model, seed, path, weight, N, preset,
/// alpha/beta/gamma/r/epsilon, outputs, tasks, label, x_min, x_max, ratio,
/// x0_max.
struct ExperimentConfig {
  SourceKind source = SourceKind::Delta;
  int sym_j = 2;  // symk
  int gl_m = 2;   // synthetic
  euler::SynthModel model = euler::SynthModel::RamanujanUniform;
  std::uint64_t seed = 1;
  std::string ingest_path;          // spinor-ingest
  std::optional<int> ingest_weight; // cross-checked against the file header
  std::size_t n = 100000;
  std::string preset = "gl2-selfdual"; // empty selects the explicit profile
  std::optional<double> alpha, beta, gamma, r;
  double epsilon = 0.01;
  std::string outputs = ".";
  std::vector<Task> tasks;
  std::string label; // empty: derived from the source
  std::size_t x_min = 10;
  std::optional<std::size_t> x_max; // default: largest x with x + x^r <= N
  double ratio = 1.1;
  std::optional<std::size_t> x0_max; // windows task requires x0 <= this
};

// `#` comments and blank lines allowed; errors carry origin:line.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig parse_config(const std::filesystem::path& path);

// One `key=value` assignment applied on top of a parsed config.
void apply_override(ExperimentConfig& config, const std::string& assignment);

struct ResolvedPlan {
  oscillate::ExponentProfile profile;
  bool advisory = false; // preset fails the criterion predicate; run anyway
  std::string advisory_reason;
  std::string label;
};

// Checks the config and resolves the profile. An explicitly supplied r
// outside (max{alpha+beta, gamma}, 1) is rejected with both bounds quoted; an
// invalid preset-derived profile only marks the plan advisory.
ResolvedPlan validate(const ExperimentConfig& config);

struct RunResult {
  int exit_code = 0; // 0 pass (or advisory), 2 failed checks
  bool all_pass = true;
  bool advisory = false;
  std::vector<std::filesystem::path> files;
  std::string summary_json; // also written to <outputs>/<label>-summary.json
};

// Executes the configured tasks; writes `<label>-<task>.csv` files and the
// summary atomically. Empty task list: success, no files.
RunResult run(const ExperimentConfig& config);

// Embedded golden suite; one [PASS]/[FAIL] line per item. Returns the number
// of failures.
int selfcheck(std::ostream& os);

// Preset table with derivation notes.
void print_presets(std::ostream& os);

} // namespace lfosc::experiment
