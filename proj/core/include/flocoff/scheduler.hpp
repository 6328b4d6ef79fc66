#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flocoff/distributions.hpp"
#include "flocoff/network.hpp"
#include "flocoff/rng.hpp"

namespace flocoff {

enum class Policy { kMklCo, kIojr, kRandom };

std::string_view to_string(Policy policy);
// Accepts "mklco", "iojr", "random"; kInvalidParameter otherwise.
Policy parse_policy(std::string_view text);

struct SchedulerConfig {
  std::int64_t threshold = 200;  // Gamma, samples collected per episode
  LabelDistribution target_global = LabelDistribution::zeros(2);
  Policy policy = Policy::kMklCo;
  // Offloading episodes per server. Each episode keeps offloading until
  // the samples it collected reach the threshold.
  std::size_t episodes = 1;

  void validate() const;
};

struct TraceEntry {
  std::size_t round = 0;  // 1-based per server
  std::size_t episode = 0;  // 1-based
  ServerId server = 0;
  double kl_to_global = 0.0;
  std::int64_t server_total = 0;
  std::optional<DeviceId> chosen_device;
};

struct OffloadTrace {
  std::vector<TraceEntry> per_round;
};

// Called once per offloaded pair with the plan built so far (which does
// not yet contain `link`).
using PowerSolver = std::function<TransferRecord(Link link, const OffloadPlan& plan_so_far)>;

// Devices whose home cell is `server` and that `plan` has not assigned yet,
// ascending id.
std::vector<DeviceId> serviceable_set(ServerId server, const Topology& topo,
                                      const OffloadPlan& plan);

// argmin over candidates of KL(normalize(D_u) || normalize(complement(global,
// server_dist))); ties go to the lower id. Empty candidates -> nullopt.
std::optional<DeviceId> select_min_kl(std::span<const DeviceId> candidates,
                                      const LabelDistribution& server_dist,
                                      const LabelDistribution& global, const Topology& topo);

struct RoundOutcome {
  DeviceId chosen = 0;
  LabelDistribution server_dist;
  PlanEntry entry;
};

// One MKL-CO step: picks u*, solves its power, merges D_u* into the server
// histogram and removes u* from `candidates`. nullopt when the pool is
// exhausted.
std::optional<RoundOutcome> mkl_co_round(ServerId server, std::vector<DeviceId>& candidates,
                                         const LabelDistribution& server_dist,
                                         const LabelDistribution& global, const Topology& topo,
                                         const PowerSolver& power_solver,
                                         const OffloadPlan& plan_so_far = {});

struct ScheduleResult {
  OffloadPlan plan;
  OffloadTrace trace;
  std::vector<LabelDistribution> server_dists;
};

// Servers in ascending id; per server, `episodes` episodes of policy picks
// (MKL-CO, nearest remaining device, or uniform remaining device) until the
// episode has collected at least `threshold` samples or the pool is empty.
// `rng` is only drawn from by the random policy.
ScheduleResult run_scheduler(const SchedulerConfig& cfg, const Topology& topo,
                             const PowerSolver& power_solver, Rng& rng);

// Mean over servers of KL-to-global at the end of each episode; a server
// that stopped early holds its last value. Entry e is episode e + 1.
std::vector<double> mean_kl_by_episode(const OffloadTrace& trace, std::size_t num_servers,
                                       std::size_t episodes);

// Same, but per offloading round.
std::vector<double> mean_kl_by_round(const OffloadTrace& trace, std::size_t num_servers);

// 1-based index of the first entry below `threshold`, or nullopt.
std::optional<std::size_t> first_below(std::span<const double> series, double threshold);

}  // namespace flocoff
