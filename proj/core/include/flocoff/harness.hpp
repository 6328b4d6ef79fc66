#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flocoff/distributions.hpp"
#include "flocoff/divergence.hpp"
#include "flocoff/error.hpp"
#include "flocoff/federated.hpp"
#include "flocoff/network.hpp"
#include "flocoff/power.hpp"
#include "flocoff/scheduler.hpp"

namespace flocoff {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kOutputDirEnv = "FLOCOFF_OUTPUT_DIR";

enum class PowerMode {
  kAuto,   // MCC-RA for MKL-CO, P_max for the baselines
  kMccRa,
  kMaxPower,
};

struct TopologyParams {
  std::size_t servers = 10;
  std::size_t devices_per_server = 20;
  double cell_radius = 100.0;
  ChannelModel channel;
};

struct DataParams {
  std::size_t classes = 10;
  std::size_t feature_dim = 16;
  NonIidProfile profile = NonIidProfile::light();
  std::int64_t bits_per_sample = 8 * (16 * 4 + 1);
  double feature_radius = 3.0;
  double feature_std = 1.0;
  std::size_t eval_per_class = 200;
  // IID reference run: each server trains on a fresh class-balanced dataset
  // of the size it would have received.
  bool iid_reference = false;
};

struct SchedulerParams {
  std::int64_t gamma = 200;
  std::size_t episodes = 1;
  Policy policy = Policy::kMklCo;
  PowerMode power = PowerMode::kAuto;
  // Target histogram; empty means uniform with total servers * gamma.
  std::vector<std::int64_t> target;
};

struct AuditParams {
  bool enabled = true;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  TopologyParams topology;
  RadioConfig radio;
  DataParams data;
  SchedulerParams scheduler;
  TrainConfig train;
  AuditParams audit;
  std::vector<std::string> tags;
  std::string output_dir = "out";

  void validate() const;

  static ScenarioConfig desk();
  static ScenarioConfig full_scale();
};

ScenarioConfig config_from_json(std::string_view text);
std::string config_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config(const std::filesystem::path& path);

struct ErrorRecord {
  std::string kind;
  std::string message;
};

struct ResultsBundle {
  ScenarioConfig config;
  OffloadTrace trace;
  OffloadPlan plan;
  PowerAllocation powers;
  double cost = 0.0;            // J under the allocated powers
  double cost_max_power = 0.0;  // J for the same plan at P_max
  std::vector<RoundMetrics> metrics;
  std::optional<DivergenceReport> divergence;
  std::optional<ErrorRecord> error;
  double wall_clock = 0.0;

  bool ok() const noexcept { return !error.has_value(); }
  double final_accuracy() const;
};

// The topology (with device histograms) that run_scenario builds for cfg.
Topology scenario_topology(const ScenarioConfig& cfg);

// Runs the whole pipeline. Module errors are caught and recorded in
// bundle.error; nothing is written to disk.
ResultsBundle run_scenario(const ScenarioConfig& cfg);

// Only the paired Non-IID/IID trainings and the bound audit.
ResultsBundle run_audit(const ScenarioConfig& cfg);

// Independent scenarios on up to `parallelism` threads, results in input
// order.
std::vector<ResultsBundle> sweep(std::span<const ScenarioConfig> cfgs, std::size_t parallelism);

enum class Format { kCsv, kJson };

// Writes offload_trace.csv, power_allocation.csv, metrics.csv,
// divergence.csv, config.json and summary.json into `dir`. Returns the
// written paths. kIo errors carry the offending path.
std::vector<std::filesystem::path> emit(const ResultsBundle& bundle,
                                        const std::filesystem::path& dir,
                                        std::span<const Format> formats);
std::vector<std::filesystem::path> emit(const ResultsBundle& bundle,
                                        const std::filesystem::path& dir);

std::string trace_csv(const OffloadTrace& trace);
std::string plan_csv(const OffloadPlan& plan);
std::string powers_csv(const PowerAllocation& powers);
std::string metrics_csv(std::span<const RoundMetrics> metrics);
std::string divergence_csv(const DivergenceReport& report);
std::string summary_json(const ResultsBundle& bundle);
std::string error_json(const ErrorRecord& error);

PowerAllocation parse_powers_csv(std::string_view text);
OffloadPlan parse_plan_csv(std::string_view text);

// The output directory for a run: the env override if set, else cfg.output_dir.
std::filesystem::path resolve_output_dir(const ScenarioConfig& cfg);

}  // namespace flocoff
