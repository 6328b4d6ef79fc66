#include "flocoff/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace flocoff {

using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view to_string(PowerMode mode) {
  switch (mode) {
    case PowerMode::kAuto: return "auto";
    case PowerMode::kMccRa: return "mccra";
    case PowerMode::kMaxPower: return "pmax";
  }
  return "auto";
}

PowerMode parse_power_mode(std::string_view text) {
  if (text == "auto") return PowerMode::kAuto;
  if (text == "mccra") return PowerMode::kMccRa;
  if (text == "pmax") return PowerMode::kMaxPower;
  throw Error(ErrorKind::kInvalidParameter, "unknown power mode '" + std::string(text) + "'");
}

PowerMode effective_power_mode(const SchedulerParams& p) {
  if (p.power != PowerMode::kAuto) return p.power;
  return p.policy == Policy::kMklCo ? PowerMode::kMccRa : PowerMode::kMaxPower;
}

json profile_to_json(const NonIidProfile& profile) {
  if (const auto* d = std::get_if<DirichletProfile>(&profile.kind)) {
    return {{"kind", "dirichlet"}, {"alpha", d->alpha}, {"samples_per_client", d->samples_per_client}};
  }
  const auto& g = std::get<GroupedProfile>(profile.kind);
  return {{"kind", "grouped"},
          {"high_mean", g.high_mean},
          {"high_std", g.high_std},
          {"low_mean", g.low_mean},
          {"low_std", g.low_std},
          {"num_high_classes", g.num_high_classes},
          {"group_size", g.group_size},
          {"redraw_per_client", g.redraw_per_client}};
}

NonIidProfile profile_from_json(const json& j, std::size_t num_classes) {
  if (j.contains("preset")) {
    const auto preset = j.at("preset").get<std::string>();
    if (preset == "light" || preset == "LN-IID") return NonIidProfile::light();
    if (preset == "heavy" || preset == "HN-IID") return NonIidProfile::heavy();
    throw Error(ErrorKind::kInvalidParameter, "unknown profile preset '" + preset + "'");
  }
  const auto kind = j.value("kind", std::string("grouped"));
  if (kind == "dirichlet") {
    DirichletProfile d;
    const auto& alpha = j.at("alpha");
    d.alpha = alpha.is_array() ? alpha.get<std::vector<double>>()
                               : std::vector<double>(num_classes, alpha.get<double>());
    d.samples_per_client = j.value("samples_per_client", d.samples_per_client);
    return NonIidProfile{d};
  }
  if (kind != "grouped") throw Error(ErrorKind::kInvalidParameter, "unknown profile kind '" + kind + "'");
  GroupedProfile g;
  g.high_mean = j.value("high_mean", g.high_mean);
  g.high_std = j.value("high_std", g.high_std);
  g.low_mean = j.value("low_mean", g.low_mean);
  g.low_std = j.value("low_std", g.low_std);
  g.num_high_classes = j.value("num_high_classes", g.num_high_classes);
  g.group_size = j.value("group_size", g.group_size);
  g.redraw_per_client = j.value("redraw_per_client", g.redraw_per_client);
  return NonIidProfile{g};
}

}  // namespace

void ScenarioConfig::validate() const {
  if (topology.servers == 0 || topology.devices_per_server == 0) {
    throw Error(ErrorKind::kInvalidParameter, "need servers >= 1 and devices_per_server >= 1");
  }
  if (!(topology.cell_radius > 0.0)) throw Error(ErrorKind::kInvalidParameter, "cell_radius must be > 0");
  radio.validate();
  data.profile.validate(data.classes);
  if (data.feature_dim < data.classes) {
    throw Error(ErrorKind::kInvalidParameter, "feature_dim must be >= classes");
  }
  if (data.bits_per_sample <= 0) throw Error(ErrorKind::kInvalidParameter, "bits_per_sample must be > 0");
  if (scheduler.gamma <= 0) throw Error(ErrorKind::kInvalidParameter, "gamma must be > 0");
  if (scheduler.episodes == 0) throw Error(ErrorKind::kInvalidParameter, "episodes must be >= 1");
  if (!scheduler.target.empty() && scheduler.target.size() != data.classes) {
    throw Error(ErrorKind::kDimension, "scheduler target must have one count per class");
  }
  train.validate();
}

ScenarioConfig ScenarioConfig::desk() {
  ScenarioConfig cfg;
  cfg.train.phi = 0.05;
  cfg.train.local_steps = 3;
  cfg.train.rounds = 20;
  cfg.tags = {"LN-IID", "HCP"};
  return cfg;
}

ScenarioConfig ScenarioConfig::full_scale() {
  ScenarioConfig cfg = desk();
  cfg.topology.devices_per_server = 100;
  cfg.scheduler.gamma = 500;
  return cfg;
}

ScenarioConfig config_from_json(std::string_view text) {
  ScenarioConfig cfg = ScenarioConfig::desk();
  try {
    const json j = json::parse(text);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.tags = j.value("tags", cfg.tags);
    if (j.contains("topology")) {
      const auto& t = j.at("topology");
      cfg.topology.servers = t.value("servers", cfg.topology.servers);
      cfg.topology.devices_per_server = t.value("devices_per_server", cfg.topology.devices_per_server);
      cfg.topology.cell_radius = t.value("cell_radius", cfg.topology.cell_radius);
      auto& ch = cfg.topology.channel;
      ch.exponent = t.value("path_loss_exponent", ch.exponent);
      if (t.contains("reference_gain_db")) ch.reference_gain = db_to_linear(t.at("reference_gain_db").get<double>());
      ch.reference_gain = t.value("reference_gain", ch.reference_gain);
      ch.reference_distance = t.value("reference_distance", ch.reference_distance);
      ch.fading = t.value("fading", ch.fading);
    }
    if (j.contains("radio")) {
      const auto& r = j.at("radio");
      cfg.radio.bandwidth = r.value("bandwidth_hz", cfg.radio.bandwidth);
      cfg.radio.subcarriers = r.value("subcarriers", cfg.radio.subcarriers);
      if (r.contains("noise_dbm")) cfg.radio.noise_power = dbm_to_watts(r.at("noise_dbm").get<double>());
      cfg.radio.noise_power = r.value("noise_power", cfg.radio.noise_power);
      cfg.radio.p_max = r.value("p_max", cfg.radio.p_max);
      cfg.radio.rated_power = r.value("rated_power", cfg.radio.rated_power);
      cfg.radio.p_min = r.value("p_min", cfg.radio.p_min);
    }
    if (j.contains("data")) {
      const auto& d = j.at("data");
      cfg.data.classes = d.value("classes", cfg.data.classes);
      cfg.data.feature_dim = d.value("feature_dim", cfg.data.feature_dim);
      if (d.contains("profile")) cfg.data.profile = profile_from_json(d.at("profile"), cfg.data.classes);
      cfg.data.bits_per_sample = d.value("bits_per_sample", cfg.data.bits_per_sample);
      cfg.data.feature_radius = d.value("feature_radius", cfg.data.feature_radius);
      cfg.data.feature_std = d.value("feature_std", cfg.data.feature_std);
      cfg.data.eval_per_class = d.value("eval_per_class", cfg.data.eval_per_class);
      cfg.data.iid_reference = d.value("iid_reference", cfg.data.iid_reference);
    }
    if (j.contains("scheduler")) {
      const auto& s = j.at("scheduler");
      cfg.scheduler.gamma = s.value("gamma", cfg.scheduler.gamma);
      cfg.scheduler.episodes = s.value("episodes", cfg.scheduler.episodes);
      if (s.contains("policy")) cfg.scheduler.policy = parse_policy(s.at("policy").get<std::string>());
      if (s.contains("power")) cfg.scheduler.power = parse_power_mode(s.at("power").get<std::string>());
      cfg.scheduler.target = s.value("target", cfg.scheduler.target);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      cfg.train.phi = t.value("phi", cfg.train.phi);
      cfg.train.local_steps = t.value("local_steps", cfg.train.local_steps);
      cfg.train.rounds = t.value("rounds", cfg.train.rounds);
      cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
    }
    if (j.contains("audit")) cfg.audit.enabled = j.at("audit").value("enabled", cfg.audit.enabled);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("config json: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
  const auto& ch = cfg.topology.channel;
  json j = {
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir},
      {"tags", cfg.tags},
      {"topology",
       {{"servers", cfg.topology.servers},
        {"devices_per_server", cfg.topology.devices_per_server},
        {"cell_radius", cfg.topology.cell_radius},
        {"path_loss_exponent", ch.exponent},
        {"reference_gain", ch.reference_gain},
        {"reference_distance", ch.reference_distance},
        {"fading", ch.fading}}},
      {"radio",
       {{"bandwidth_hz", cfg.radio.bandwidth},
        {"subcarriers", cfg.radio.subcarriers},
        {"noise_power", cfg.radio.noise_power},
        {"p_max", cfg.radio.p_max},
        {"rated_power", cfg.radio.rated_power},
        {"p_min", cfg.radio.p_min}}},
      {"data",
       {{"classes", cfg.data.classes},
        {"feature_dim", cfg.data.feature_dim},
        {"profile", profile_to_json(cfg.data.profile)},
        {"bits_per_sample", cfg.data.bits_per_sample},
        {"feature_radius", cfg.data.feature_radius},
        {"feature_std", cfg.data.feature_std},
        {"eval_per_class", cfg.data.eval_per_class},
        {"iid_reference", cfg.data.iid_reference}}},
      {"scheduler",
       {{"gamma", cfg.scheduler.gamma},
        {"episodes", cfg.scheduler.episodes},
        {"policy", to_string(cfg.scheduler.policy)},
        {"power", to_string(cfg.scheduler.power)},
        {"target", cfg.scheduler.target}}},
      {"train",
       {{"phi", cfg.train.phi},
        {"local_steps", cfg.train.local_steps},
        {"rounds", cfg.train.rounds},
        {"batch_size", cfg.train.batch_size}}},
      {"audit", {{"enabled", cfg.audit.enabled}}},
  };
  return j.dump(2) + "\n";
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

double ResultsBundle::final_accuracy() const {
  return metrics.empty() ? 0.0 : metrics.back().accuracy;
}

namespace {

struct Pipeline {
  Topology topo;
  FeatureModel features;
  LabelDistribution target;
};

Pipeline build_pipeline(const ScenarioConfig& cfg) {
  const std::size_t num_devices = cfg.topology.servers * cfg.topology.devices_per_server;
  Rng data_rng = make_stream(cfg.seed, "data");
  const auto dists = generate_clients(cfg.data.profile, cfg.data.classes, num_devices, data_rng);
  Rng topo_rng = make_stream(cfg.seed, "topology");
  auto topo = place_topology(cfg.topology.servers, cfg.topology.devices_per_server,
                             cfg.topology.cell_radius, cfg.topology.channel, topo_rng)
                  .with_device_data(dists, cfg.data.bits_per_sample);
  auto target = cfg.scheduler.target.empty()
                    ? LabelDistribution::uniform(
                          cfg.data.classes,
                          static_cast<std::int64_t>(cfg.topology.servers) * cfg.scheduler.gamma)
                    : LabelDistribution(cfg.scheduler.target);
  return {std::move(topo),
          FeatureModel::axis_aligned(cfg.data.classes, cfg.data.feature_dim,
                                     cfg.data.feature_radius, cfg.data.feature_std),
          std::move(target)};
}

// Power chosen while the plan is still being built: interference comes from
// the cochannel links already planned.
PowerSolver in_loop_solver(const Topology& topo, const RadioConfig& radio, PowerMode mode) {
  return [&topo, radio, mode](Link link, const OffloadPlan& plan_so_far) {
    auto links = plan_so_far.links();
    links.push_back(link);
    const auto map = assign_subcarriers(links, radio.subcarriers);
    const auto params = pair_params(link, map, topo, radio);
    TransferRecord rec;
    rec.power = mode == PowerMode::kMccRa ? mcc_ra(params).power : radio.p_max;
    rec.rate = radio.subcarrier_bandwidth() * std::log2(1.0 + params.kappa * rec.power);
    rec.time = transfer_time(static_cast<double>(topo.device(link.device).data_bits), rec.rate);
    rec.energy = rec.power * rec.time;
    return rec;
  };
}

SchedulerConfig scheduler_config(const ScenarioConfig& cfg, const LabelDistribution& target) {
  SchedulerConfig sc;
  sc.threshold = cfg.scheduler.gamma;
  sc.target_global = target;
  sc.policy = cfg.scheduler.policy;
  sc.episodes = cfg.scheduler.episodes;
  return sc;
}

// One dataset per server with data, in server order.
std::vector<Dataset> server_datasets(const Pipeline& p, const OffloadPlan& plan, std::uint64_t seed) {
  std::vector<Dataset> out;
  for (const auto& srv : p.topo.servers()) {
    Dataset d(p.features.num_classes(), p.features.dim());
    for (DeviceId u : plan.devices_of(srv.id)) {
      Rng rng = make_stream(seed, "features/device", u);
      d.append(materialize(p.topo.device(u).dist, p.features, rng));
    }
    if (!d.empty()) out.push_back(std::move(d));
  }
  return out;
}

Dataset concatenate(std::span<const Dataset> parts) {
  Dataset out;
  for (const auto& d : parts) out.append(d);
  return out;
}

// Same pooled samples reshuffled into servers of the same sizes.
std::vector<Dataset> iid_counterpart(std::span<const Dataset> noniid, std::uint64_t seed) {
  const Dataset pool = concatenate(noniid);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_stream(seed, "iid");
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Dataset> out;
  std::size_t offset = 0;
  for (const auto& d : noniid) {
    out.push_back(pool.subset(std::span<const std::size_t>(order).subspan(offset, d.size())));
    offset += d.size();
  }
  return out;
}

// Same server sizes, exactly uniform class counts, fresh features.
std::vector<Dataset> balanced_counterpart(std::span<const Dataset> noniid, const FeatureModel& features,
                                          std::uint64_t seed) {
  std::vector<Dataset> out;
  for (std::size_t s = 0; s < noniid.size(); ++s) {
    Rng rng = make_stream(seed, "iid/server", s);
    out.push_back(materialize(
        LabelDistribution::uniform(features.num_classes(), static_cast<std::int64_t>(noniid[s].size())),
        features, rng));
  }
  return out;
}

DivergenceReport audit(std::span<const Dataset> noniid, const TrainConfig& train, std::uint64_t seed) {
  TrainConfig full = train;
  full.batch_size = 0;
  const auto iid = iid_counterpart(noniid, seed);
  const auto run = run_paired(noniid, iid, full);
  const auto gammas = measure_gammas(run, noniid, concatenate(noniid));
  const auto smooth = lipschitz_bound(noniid);
  return audit_divergence_bound(run, gammas, smooth.per_server);
}

template <typename Body>
ResultsBundle guarded(const ScenarioConfig& cfg, Body body) {
  ResultsBundle bundle;
  bundle.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  try {
    cfg.validate();
    body(bundle);
  } catch (const Error& e) {
    bundle.error = ErrorRecord{std::string(to_string(e.kind())), e.what()};
  } catch (const std::exception& e) {
    bundle.error = ErrorRecord{"internal", e.what()};
  }
  bundle.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return bundle;
}

}  // namespace

Topology scenario_topology(const ScenarioConfig& cfg) {
  cfg.validate();
  return build_pipeline(cfg).topo;
}

ResultsBundle run_scenario(const ScenarioConfig& cfg) {
  return guarded(cfg, [&](ResultsBundle& bundle) {
    const auto p = build_pipeline(cfg);
    const PowerMode mode = effective_power_mode(cfg.scheduler);
    Rng sched_rng = make_stream(cfg.seed, "scheduler");
    auto schedule = run_scheduler(scheduler_config(cfg, p.target), p.topo,
                                  in_loop_solver(p.topo, cfg.radio, mode), sched_rng);

    // Final allocation once the plan, and with it every cochannel set, is fixed.
    const auto links = schedule.plan.links();
    const auto map = assign_subcarriers(links, cfg.radio.subcarriers);
    auto powers = mode == PowerMode::kMccRa ? allocate_powers(links, map, p.topo, cfg.radio)
                                            : fixed_powers(links, cfg.radio.p_max, map, p.topo, cfg.radio);
    for (const auto& link : links) {
      schedule.plan.set_record(link, evaluate_link(link, powers, map, p.topo, cfg.radio));
    }
    bundle.cost = system_cost(schedule.plan, powers, p.topo, cfg.radio, map);
    bundle.cost_max_power =
        system_cost(schedule.plan, fixed_powers(links, cfg.radio.p_max, map, p.topo, cfg.radio),
                    p.topo, cfg.radio, map);
    bundle.trace = std::move(schedule.trace);
    bundle.plan = std::move(schedule.plan);
    bundle.powers = std::move(powers);

    auto datasets = server_datasets(p, bundle.plan, cfg.seed);
    if (datasets.empty()) throw Error(ErrorKind::kInvalidInput, "no server received any data");
    if (cfg.data.iid_reference) datasets = balanced_counterpart(datasets, p.features, cfg.seed);
    Rng eval_rng = make_stream(cfg.seed, "eval");
    const auto eval = materialize(
        LabelDistribution::uniform(cfg.data.classes,
                                   static_cast<std::int64_t>(cfg.data.eval_per_class * cfg.data.classes)),
        p.features, eval_rng);
    TrainConfig train = cfg.train;
    train.batch_seed = mix_seed(cfg.seed, "batch");
    bundle.metrics = run_fl(datasets, train, eval).metrics;
    if (cfg.audit.enabled) bundle.divergence = audit(datasets, cfg.train, cfg.seed);
  });
}

ResultsBundle run_audit(const ScenarioConfig& cfg) {
  return guarded(cfg, [&](ResultsBundle& bundle) {
    const auto p = build_pipeline(cfg);
    Rng sched_rng = make_stream(cfg.seed, "scheduler");
    auto schedule = run_scheduler(scheduler_config(cfg, p.target), p.topo, {}, sched_rng);
    bundle.trace = std::move(schedule.trace);
    bundle.plan = std::move(schedule.plan);
    const auto datasets = server_datasets(p, bundle.plan, cfg.seed);
    if (datasets.empty()) throw Error(ErrorKind::kInvalidInput, "no server received any data");
    bundle.divergence = audit(datasets, cfg.train, cfg.seed);
  });
}

std::vector<ResultsBundle> sweep(std::span<const ScenarioConfig> cfgs, std::size_t parallelism) {
  std::vector<ResultsBundle> results(cfgs.size());
  if (cfgs.empty()) return results;
  const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, cfgs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) results[i] = run_scenario(cfgs[i]);
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return results;
}

std::string trace_csv(const OffloadTrace& trace) {
  std::string out = "round,server,kl,total,device\n";
  for (const auto& e : trace.per_round) {
    out += std::to_string(e.round) + ',' + std::to_string(e.server) + ',' + num(e.kl_to_global) + ',' +
           std::to_string(e.server_total) + ',' +
           (e.chosen_device ? std::to_string(*e.chosen_device) : std::string()) + '\n';
  }
  return out;
}

std::string plan_csv(const OffloadPlan& plan) {
  std::string out = "device,server,power,rate,time,energy\n";
  for (const auto& e : plan.entries()) {
    out += std::to_string(e.link.device) + ',' + std::to_string(e.link.server) + ',' +
           num(e.record.power) + ',' + num(e.record.rate) + ',' + num(e.record.time) + ',' +
           num(e.record.energy) + '\n';
  }
  return out;
}

std::string powers_csv(const PowerAllocation& powers) {
  std::string out = "u,s,p_us,energy\n";
  for (const auto& [link, p] : powers) {
    out += std::to_string(link.device) + ',' + std::to_string(link.server) + ',' + num(p.power) + ',' +
           num(p.energy) + '\n';
  }
  return out;
}

std::string metrics_csv(std::span<const RoundMetrics> metrics) {
  std::string out = "round,loss,accuracy,local_loss\n";
  for (const auto& m : metrics) {
    out += std::to_string(m.round) + ',' + num(m.aggregate_loss) + ',' + num(m.accuracy) + ',' +
           num(m.global_loss) + '\n';
  }
  return out;
}

std::string divergence_csv(const DivergenceReport& report) {
  std::string out = "round,lhs,rhs,holds\n";
  for (const auto& r : report.per_round) {
    out += std::to_string(r.round) + ',' + num(r.lhs) + ',' + num(r.rhs) + ',' +
           (r.holds ? "1" : "0") + '\n';
  }
  return out;
}

std::string error_json(const ErrorRecord& error) {
  return json{{"error", {{"kind", error.kind}, {"message", error.message}}}}.dump() + "\n";
}

std::string summary_json(const ResultsBundle& b) {
  json j = {
      {"schema_version", kSchemaVersion},
      {"version", std::string(kVersion)},
      {"ok", b.ok()},
      {"seed", b.config.seed},
      {"policy", to_string(b.config.scheduler.policy)},
      {"tags", b.config.tags},
      {"cost_joules", b.cost},
      {"cost_max_power_joules", b.cost_max_power},
      {"final_accuracy", b.final_accuracy()},
      {"rounds", b.metrics.size()},
      {"offloaded_devices", b.plan.size()},
  };
  if (b.divergence) {
    j["divergence"] = {{"rounds", b.divergence->per_round.size()},
                       {"fraction_holding", b.divergence->fraction_holding()},
                       {"all_hold", b.divergence->all_hold()}};
  }
  if (b.error) j["error"] = {{"kind", b.error->kind}, {"message", b.error->message}};
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename RowFn>
void for_each_row(std::string_view text, std::string_view header, std::size_t columns, RowFn fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorKind::kInvalidInput, "csv: expected header '" + std::string(header) + "'");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != columns) throw Error(ErrorKind::kInvalidInput, "csv: bad row '" + line + "'");
    fn(cells);
  }
}

}  // namespace

PowerAllocation parse_powers_csv(std::string_view text) {
  PowerAllocation out;
  for_each_row(text, "u,s,p_us,energy", 4, [&](const std::vector<std::string>& c) {
    out.set({std::stoul(c[0]), std::stoul(c[1])}, {std::stod(c[2]), std::stod(c[3])});
  });
  return out;
}

OffloadPlan parse_plan_csv(std::string_view text) {
  OffloadPlan out;
  for_each_row(text, "device,server,power,rate,time,energy", 6, [&](const std::vector<std::string>& c) {
    out.add({std::stoul(c[0]), std::stoul(c[1])},
            {std::stod(c[2]), std::stod(c[3]), std::stod(c[4]), std::stod(c[5])});
  });
  return out;
}

std::filesystem::path resolve_output_dir(const ScenarioConfig& cfg) {
  if (const char* env = std::getenv(std::string(kOutputDirEnv).c_str()); env != nullptr && *env != '\0') {
    return env;
  }
  return cfg.output_dir;
}

namespace {

std::filesystem::path write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
  return path;
}

}  // namespace

std::vector<std::filesystem::path> emit(const ResultsBundle& bundle, const std::filesystem::path& dir,
                                        std::span<const Format> formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const auto wants = [&](Format f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
  std::vector<std::filesystem::path> written;
  if (wants(Format::kCsv)) {
    written.push_back(write_file(dir / "offload_trace.csv", trace_csv(bundle.trace)));
    written.push_back(write_file(dir / "offload_plan.csv", plan_csv(bundle.plan)));
    written.push_back(write_file(dir / "power_allocation.csv", powers_csv(bundle.powers)));
    written.push_back(write_file(dir / "metrics.csv", metrics_csv(bundle.metrics)));
    if (bundle.divergence) {
      written.push_back(write_file(dir / "divergence.csv", divergence_csv(*bundle.divergence)));
    }
  }
  if (wants(Format::kJson)) {
    written.push_back(write_file(dir / "config.json", config_to_json(bundle.config)));
    written.push_back(write_file(dir / "summary.json", summary_json(bundle)));
  }
  return written;
}

std::vector<std::filesystem::path> emit(const ResultsBundle& bundle, const std::filesystem::path& dir) {
  static constexpr Format kAll[] = {Format::kCsv, Format::kJson};
  return emit(bundle, dir, kAll);
}

}  // namespace flocoff
