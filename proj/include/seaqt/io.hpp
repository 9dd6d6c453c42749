#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seaqt/batch.hpp"
#include "seaqt/scenarios.hpp"

namespace seaqt {

/// Exit-code taxonomy shared by every subcommand: CI can triage runs without
/// parsing logs.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,   ///< user/config problem, no partial outputs
  kExitNumericalError = 2,  ///< positivity loss or step underflow, last good time reported
  kExitInvariantError = 3   ///< a checked relation failed beyond tolerance
};

/// Flat-key run configuration ("section.key = value" lines, '#' comments).
/// Unknown keys are rejected so typos fail loudly.
struct RunConfig {
  std::string scenario = "four-level-const-tau";  ///< named scenario or "inline"
  std::uint64_t seed = 42;

  // inline scenario definition (used when scenario = "inline")
  std::vector<double> levels;
  std::optional<double> mean_energy;
  std::vector<double> initial;  ///< anchor distribution at t = 0

  // tau.*
  std::string tau_policy = "constant";  ///< "constant" | "adaptive-equality"
  double tau_value = 1.0;

  // stepper.*
  std::string stepper_kind;  ///< "rk4" | "rk45"; empty = scenario default
  std::optional<double> dt, rtol, atol, dt_min, dt_max;

  // run.*
  std::optional<double> t_start, t_end, backward_horizon;
  std::optional<int> sample_every;
  std::string mode;  ///< "diagonal" | "full"; empty = scenario default
  bool backward = false;
  std::optional<bool> stop_when_relaxed;
  std::vector<std::string> observables;  ///< names: H, S, P1..; empty = defaults

  // output.*
  std::string output_dir = "out";

  // verify.*
  std::vector<int> verify_dims = {2, 3, 4, 5, 6};
  int verify_count = 1000;
  std::vector<std::string> verify_kinds = {"diagonal", "full", "rank-deficient"};
  int verify_pairs = 1;  ///< random (F,G) pairs per state for the pair family
  std::string verify_replay;     ///< path to a serialized state; verify only that state
  std::string threads = "auto";  ///< "auto" | "serial" | thread count

  // contrast.*
  std::optional<ContrastConfig> contrast;

  static RunConfig from_file(const std::filesystem::path& file);
  static RunConfig from_text(const std::string& text);
  /// Canonical flat-key serialization; hashing this gives the config hash.
  std::string to_text() const;
  std::uint64_t hash() const;

  ExecPolicy exec_policy() const;
  ScenarioConfig resolve_scenario() const;  ///< applies overrides to the named/inline scenario
};

/// Files produced by one command, echoed in the summary JSON.
struct OutputBundle {
  std::filesystem::path directory;
  std::filesystem::path trajectory_csv;
  std::filesystem::path report_csv;
  std::filesystem::path summary_json;
  std::vector<std::filesystem::path> plot_files;
};

/// simulate: integrate the configured scenario and serialize the trajectory,
/// the per-sample uncertainty report and the summary. Returns kExitOk,
/// kExitNumericalError or kExitInvariantError.
int cmd_simulate(const RunConfig& config, OutputBundle* bundle = nullptr);

/// verify: run the inequality suite over a reproducible random corpus plus
/// random observable pairs; report the worst residual per family.
int cmd_verify(const RunConfig& config, OutputBundle* bundle = nullptr);

/// contrast: Pauli vs SEA repopulation of an exact-zero level.
int cmd_contrast(const RunConfig& config, OutputBundle* bundle = nullptr);

/// Doubles printed with 17 significant digits round-trip bit-faithfully.
std::string format_double(double v);

}  // namespace seaqt
