#include "flocoff/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "flocoff/divergence.hpp"
#include "flocoff/error.hpp"

namespace flocoff {

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::kMklCo: return "mklco";
    case Policy::kIojr: return "iojr";
    case Policy::kRandom: return "random";
  }
  return "unknown";
}

Policy parse_policy(std::string_view text) {
  if (text == "mklco") return Policy::kMklCo;
  if (text == "iojr") return Policy::kIojr;
  if (text == "random") return Policy::kRandom;
  throw Error(ErrorKind::kInvalidParameter, "unknown policy '" + std::string(text) + "'");
}

void SchedulerConfig::validate() const {
  if (threshold <= 0) throw Error(ErrorKind::kInvalidParameter, "threshold must be > 0");
  if (target_global.total() <= 0) {
    throw Error(ErrorKind::kInvalidParameter, "global target must have a positive total");
  }
  if (episodes == 0) throw Error(ErrorKind::kInvalidParameter, "episodes must be >= 1");
}

std::vector<DeviceId> serviceable_set(ServerId server, const Topology& topo,
                                      const OffloadPlan& plan) {
  if (server >= topo.num_servers()) throw Error(ErrorKind::kLookup, "server not in topology");
  std::vector<DeviceId> out;
  for (const auto& d : topo.devices()) {
    if (d.home == server && !plan.server_of(d.id)) out.push_back(d.id);
  }
  return out;
}

std::optional<DeviceId> select_min_kl(std::span<const DeviceId> candidates,
                                      const LabelDistribution& server_dist,
                                      const LabelDistribution& global, const Topology& topo) {
  if (candidates.empty()) return std::nullopt;
  const auto missing = normalize(complement(global, server_dist));
  std::optional<DeviceId> best;
  double best_kl = std::numeric_limits<double>::infinity();
  for (DeviceId u : candidates) {
    const double value = kl(normalize(topo.device(u).dist), missing);
    if (!best || value < best_kl || (value == best_kl && u < *best)) {
      best = u;
      best_kl = value;
    }
  }
  return best;
}

namespace {

PlanEntry offload(Link link, const PowerSolver& power_solver, const OffloadPlan& plan_so_far) {
  PlanEntry entry{link, {}};
  if (power_solver) entry.record = power_solver(link, plan_so_far);
  return entry;
}

void erase_candidate(std::vector<DeviceId>& candidates, DeviceId u) {
  candidates.erase(std::remove(candidates.begin(), candidates.end(), u), candidates.end());
}

std::optional<DeviceId> select_nearest(std::span<const DeviceId> candidates, ServerId server,
                                       const Topology& topo) {
  std::optional<DeviceId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (DeviceId u : candidates) {
    const double d = distance(topo.device(u).position, topo.server(server).position);
    if (!best || d < best_d || (d == best_d && u < *best)) {
      best = u;
      best_d = d;
    }
  }
  return best;
}

std::optional<DeviceId> select_random(std::span<const DeviceId> candidates, Rng& rng) {
  if (candidates.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(rng)];
}

}  // namespace

std::optional<RoundOutcome> mkl_co_round(ServerId server, std::vector<DeviceId>& candidates,
                                         const LabelDistribution& server_dist,
                                         const LabelDistribution& global, const Topology& topo,
                                         const PowerSolver& power_solver,
                                         const OffloadPlan& plan_so_far) {
  const auto chosen = select_min_kl(candidates, server_dist, global, topo);
  if (!chosen) return std::nullopt;
  RoundOutcome out{*chosen, server_dist + topo.device(*chosen).dist,
                   offload({*chosen, server}, power_solver, plan_so_far)};
  erase_candidate(candidates, *chosen);
  return out;
}

ScheduleResult run_scheduler(const SchedulerConfig& cfg, const Topology& topo,
                             const PowerSolver& power_solver, Rng& rng) {
  cfg.validate();
  const std::size_t num_classes = cfg.target_global.num_classes();
  const auto global_probs = normalize(cfg.target_global);

  ScheduleResult result;
  for (const auto& srv : topo.servers()) {
    const ServerId s = srv.id;
    auto candidates = serviceable_set(s, topo, result.plan);
    auto server_dist = LabelDistribution::zeros(num_classes);
    std::size_t round = 0;
    bool exhausted = false;

    for (std::size_t episode = 1; episode <= cfg.episodes && !exhausted; ++episode) {
      std::int64_t collected = 0;
      while (collected < cfg.threshold) {
        PlanEntry entry;
        DeviceId chosen = 0;
        if (cfg.policy == Policy::kMklCo) {
          auto outcome = mkl_co_round(s, candidates, server_dist, cfg.target_global, topo,
                                      power_solver, result.plan);
          if (!outcome) {
            exhausted = true;
            break;
          }
          chosen = outcome->chosen;
          entry = outcome->entry;
          server_dist = std::move(outcome->server_dist);
        } else {
          const auto pick = cfg.policy == Policy::kIojr ? select_nearest(candidates, s, topo)
                                                        : select_random(candidates, rng);
          if (!pick) {
            exhausted = true;
            break;
          }
          chosen = *pick;
          entry = offload({chosen, s}, power_solver, result.plan);
          server_dist += topo.device(chosen).dist;
          erase_candidate(candidates, chosen);
        }
        result.plan.add(entry.link, entry.record);
        collected += topo.device(chosen).dist.total();

        TraceEntry t;
        t.round = ++round;
        t.episode = episode;
        t.server = s;
        t.kl_to_global = kl(normalize(server_dist), global_probs);
        t.server_total = server_dist.total();
        t.chosen_device = chosen;
        result.trace.per_round.push_back(t);
      }
    }
    result.server_dists.push_back(std::move(server_dist));
  }
  return result;
}

namespace {

// series[s][i] for each server, padded with its last value to `length`.
std::vector<double> mean_padded(const std::vector<std::vector<double>>& series, std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : series) {
      if (s.empty()) continue;
      sum += i < s.size() ? s[i] : s.back();
      ++n;
    }
    out[i] = n == 0 ? 0.0 : sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace

std::vector<double> mean_kl_by_episode(const OffloadTrace& trace, std::size_t num_servers,
                                       std::size_t episodes) {
  std::vector<std::vector<double>> per_server(num_servers);
  for (const auto& e : trace.per_round) {
    if (e.server >= num_servers || e.episode == 0) continue;
    auto& s = per_server[e.server];
    if (s.size() < e.episode) s.resize(e.episode, e.kl_to_global);
    s[e.episode - 1] = e.kl_to_global;
  }
  return mean_padded(per_server, episodes);
}

std::vector<double> mean_kl_by_round(const OffloadTrace& trace, std::size_t num_servers) {
  std::vector<std::vector<double>> per_server(num_servers);
  std::size_t longest = 0;
  for (const auto& e : trace.per_round) {
    if (e.server >= num_servers) continue;
    per_server[e.server].push_back(e.kl_to_global);
    longest = std::max(longest, per_server[e.server].size());
  }
  return mean_padded(per_server, longest);
}

std::optional<std::size_t> first_below(std::span<const double> series, double threshold) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] < threshold) return i + 1;
  }
  return std::nullopt;
}

}  // namespace flocoff
