#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpstomo/state_factory.hpp"
#include "mpstomo/tomography.hpp"

namespace mpstomo {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Backend { Dense, Mps, Auto };
enum class OutputFormat { Records, Table };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);
std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view name);
std::string_view to_string(BoundaryGauge gauge);
BoundaryGauge parse_boundary_gauge(std::string_view name);

struct BenchConfig {
  std::vector<int> sizes{8, 16, 32, 64};
  /// Timings are the best of this many repetitions.
  int repeats = 3;
};

/// One campaign: a target state, a protocol configuration and the trial
/// plan. Read from a JSON document; command-line flags override fields.
///
/// Per-trial seeds are derive_seed(seed, trial). Within a trial the state
/// (for random families) uses derive_seed(trial_seed, 0) and the noise
/// derive_seed(trial_seed, 1), unless the document pins `state.seed`.
struct ExperimentConfig {
  ExperimentConfig() { protocol.chi = 2; }

  StateSpec state = StateSpec::random_mps(8, 2, 0);
  bool state_seed_fixed = false;
  /// Unless pinned, the bond dimension of random_mps states follows
  /// protocol.chi.
  bool state_chi_fixed = false;
  /// When positive, each trial state is perturb()ed by this amount with seed
  /// derive_seed(trial_seed, 2). Dense backend only.
  double perturbation = 0.0;
  ProtocolConfig protocol;
  int trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::Records;
  Backend backend = Backend::Auto;
  /// Certification threshold on 1 - prod p_i.
  double threshold = 1e-3;
  BenchConfig bench;

  /// State spec as used for trial `trial_seed`.
  StateSpec state_for(std::uint64_t trial_seed) const;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig load(const std::filesystem::path& path);
};

/// Dense when d^n fits under the dense guard, MPS otherwise.
Backend resolve_backend(Backend requested, int n, int d);

/// Worker count for trial-level parallelism: MPSTOMO_THREADS when set to a
/// positive integer, else the hardware concurrency.
int worker_threads();

/// Output of one command. Records are a header, one record per trial (or per
/// bench size) ordered by index, and a summary.
struct RunManifest {
  std::string command;
  nlohmann::json header;
  std::vector<nlohmann::json> trials;
  nlohmann::json summary;

  /// 2 when the summary verdict is "reject", else 0.
  int exit_code() const;
  std::vector<nlohmann::json> records() const;
  /// One JSON document per line.
  std::string to_records() const;
  /// Tab-separated, one row per trial record, for plotting.
  std::string to_table() const;
  std::string render(OutputFormat format) const;
};

RunManifest cmd_run(const ExperimentConfig& config);
RunManifest cmd_certify(const ExperimentConfig& config);
RunManifest cmd_bench(const ExperimentConfig& config);
RunManifest cmd_demo(const ExperimentConfig& config, StateFamily family);

/// Structural check of one manifest record against the published schema.
/// Returns the problems found; empty means valid.
std::vector<std::string> check_record(const nlohmann::json& record);

/// Removes wall-clock fields, which are the only non-reproducible content.
nlohmann::json without_timing(nlohmann::json record);

}  // namespace mpstomo
