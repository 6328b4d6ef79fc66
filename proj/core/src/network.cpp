#include "flocoff/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "flocoff/error.hpp"

namespace flocoff {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

double channel_gain(double distance_m, const ChannelModel& model, Rng& rng) {
  if (!(distance_m > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter, "channel gain needs a positive distance");
  }
  double gain = model.reference_gain * std::pow(model.reference_distance / distance_m, model.exponent);
  if (model.fading) {
    std::exponential_distribution<double> rayleigh_power(1.0);
    gain *= rayleigh_power(rng);
  }
  return gain;
}

void RadioConfig::validate() const {
  if (subcarriers < 1) throw Error(ErrorKind::kInvalidParameter, "need at least one subcarrier");
  if (!(bandwidth > 0.0)) throw Error(ErrorKind::kInvalidParameter, "bandwidth must be > 0");
  if (!(noise_power > 0.0)) throw Error(ErrorKind::kInvalidParameter, "noise power must be > 0");
  if (!(rated_power > 0.0) || rated_power > p_max) {
    throw Error(ErrorKind::kInvalidParameter, "rated power must lie in (0, p_max]");
  }
  if (!(p_min > 0.0) || !(p_min < p_max)) {
    throw Error(ErrorKind::kInvalidParameter, "need 0 < p_min < p_max");
  }
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Topology::Topology(std::vector<EdgeServer> servers, std::vector<UserDevice> devices,
                   double cell_radius, std::vector<double> gains)
    : servers_(std::move(servers)),
      devices_(std::move(devices)),
      cell_radius_(cell_radius),
      gains_(std::move(gains)) {
  if (gains_.size() != servers_.size() * devices_.size()) {
    throw Error(ErrorKind::kDimension, "gain matrix must be devices x servers");
  }
  for (double h : gains_) {
    if (!(h > 0.0)) throw Error(ErrorKind::kInvalidParameter, "channel gains must be > 0");
  }
  for (std::size_t s = 0; s < servers_.size(); ++s) {
    if (servers_[s].id != s) throw Error(ErrorKind::kInvalidInput, "server ids must be 0..S-1");
  }
  for (std::size_t u = 0; u < devices_.size(); ++u) {
    if (devices_[u].id != u) throw Error(ErrorKind::kInvalidInput, "device ids must be 0..U-1");
    if (devices_[u].home >= servers_.size()) {
      throw Error(ErrorKind::kInvalidInput, "device home server out of range");
    }
  }
}

ServerId Topology::nearest_server(Position p) const {
  if (servers_.empty()) throw Error(ErrorKind::kLookup, "topology has no servers");
  ServerId best = 0;
  double best_d = distance(p, servers_[0].position);
  for (std::size_t s = 1; s < servers_.size(); ++s) {
    const double d = distance(p, servers_[s].position);
    if (d < best_d) {
      best = s;
      best_d = d;
    }
  }
  return best;
}

Topology Topology::with_device_data(std::span<const LabelDistribution> dists,
                                    std::int64_t bits_per_sample) const {
  if (dists.size() != devices_.size()) {
    throw Error(ErrorKind::kDimension, "one label distribution per device required");
  }
  if (bits_per_sample <= 0) throw Error(ErrorKind::kInvalidParameter, "bits_per_sample must be > 0");
  Topology out = *this;
  for (std::size_t u = 0; u < dists.size(); ++u) {
    out.devices_[u].dist = dists[u];
    out.devices_[u].data_bits = dists[u].total() * bits_per_sample;
  }
  return out;
}

std::vector<Position> hex_cell_centers(std::size_t count, double cell_radius) {
  // Axial coordinates of a pointy-top lattice, walked ring by ring.
  static constexpr int kDirs[6][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};
  const double sqrt3 = std::numbers::sqrt3;
  auto to_xy = [&](int q, int r) {
    return Position{cell_radius * sqrt3 * (q + 0.5 * r), cell_radius * 1.5 * r};
  };
  std::vector<Position> centers;
  centers.reserve(count);
  if (count == 0) return centers;
  centers.push_back(to_xy(0, 0));
  for (int ring = 1; centers.size() < count; ++ring) {
    int q = kDirs[4][0] * ring, r = kDirs[4][1] * ring;
    for (int side = 0; side < 6 && centers.size() < count; ++side) {
      for (int step = 0; step < ring && centers.size() < count; ++step) {
        centers.push_back(to_xy(q, r));
        q += kDirs[side][0];
        r += kDirs[side][1];
      }
    }
  }
  return centers;
}

Topology place_topology(std::size_t num_servers, std::size_t devices_per_server,
                        double cell_radius, const ChannelModel& channel, Rng& rng) {
  if (num_servers == 0 || devices_per_server == 0) {
    throw Error(ErrorKind::kInvalidParameter, "need at least one server and one device per server");
  }
  if (!(cell_radius > 0.0)) throw Error(ErrorKind::kInvalidParameter, "cell radius must be > 0");

  std::vector<EdgeServer> servers;
  const auto centers = hex_cell_centers(num_servers, cell_radius);
  for (std::size_t s = 0; s < num_servers; ++s) servers.push_back({s, centers[s]});
  Topology layout(servers, {}, cell_radius, {});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<UserDevice> devices;
  devices.reserve(num_servers * devices_per_server);
  for (std::size_t s = 0; s < num_servers; ++s) {
    for (std::size_t i = 0; i < devices_per_server; ++i) {
      Position p;
      do {
        // Uniform on the disc, kept only inside the home cell's Voronoi region.
        const double radius = cell_radius * std::sqrt(unit(rng));
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        p = {centers[s].x + radius * std::cos(angle), centers[s].y + radius * std::sin(angle)};
      } while (layout.nearest_server(p) != s);
      UserDevice d;
      d.id = devices.size();
      d.position = p;
      d.home = s;
      devices.push_back(std::move(d));
    }
  }

  std::vector<double> gains;
  gains.reserve(devices.size() * num_servers);
  for (const auto& d : devices) {
    for (const auto& srv : servers) {
      // Closer than the reference distance is treated as the reference distance.
      const double dist = std::max(distance(d.position, srv.position), channel.reference_distance);
      gains.push_back(channel_gain(dist, channel, rng));
    }
  }
  return Topology(std::move(servers), std::move(devices), cell_radius, std::move(gains));
}

std::string topology_to_json(const Topology& topo) {
  nlohmann::json j;
  j["cell_radius"] = topo.cell_radius();
  for (const auto& s : topo.servers()) {
    j["servers"].push_back({{"id", s.id}, {"x", s.position.x}, {"y", s.position.y}});
  }
  j["devices"] = nlohmann::json::array();
  for (const auto& d : topo.devices()) {
    j["devices"].push_back({{"id", d.id},
                            {"x", d.position.x},
                            {"y", d.position.y},
                            {"home", d.home},
                            {"data_bits", d.data_bits},
                            {"counts", std::vector<std::int64_t>(d.dist.counts().begin(),
                                                                 d.dist.counts().end())}});
  }
  j["gains"] = std::vector<double>(topo.gains().begin(), topo.gains().end());
  return j.dump(2);
}

Topology topology_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    std::vector<EdgeServer> servers;
    for (const auto& s : j.at("servers")) {
      servers.push_back({s.at("id").get<ServerId>(), {s.at("x").get<double>(), s.at("y").get<double>()}});
    }
    std::vector<UserDevice> devices;
    for (const auto& d : j.at("devices")) {
      UserDevice u;
      u.id = d.at("id").get<DeviceId>();
      u.position = {d.at("x").get<double>(), d.at("y").get<double>()};
      u.home = d.at("home").get<ServerId>();
      u.data_bits = d.at("data_bits").get<std::int64_t>();
      u.dist = LabelDistribution(d.at("counts").get<std::vector<std::int64_t>>());
      devices.push_back(std::move(u));
    }
    return Topology(std::move(servers), std::move(devices), j.at("cell_radius").get<double>(),
                    j.at("gains").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("topology json: ") + e.what());
  }
}

void SubcarrierMap::assign(Link link, std::size_t k) {
  if (auto it = assignment_.find(link); it != assignment_.end()) {
    auto& old = cochannel_[it->second];
    old.erase(std::remove(old.begin(), old.end(), link), old.end());
  }
  assignment_[link] = k;
  cochannel_[k].push_back(link);
}

std::optional<std::size_t> SubcarrierMap::subcarrier(Link link) const {
  auto it = assignment_.find(link);
  if (it == assignment_.end()) return std::nullopt;
  return it->second;
}

std::span<const Link> SubcarrierMap::cochannel(std::size_t k) const {
  auto it = cochannel_.find(k);
  if (it == cochannel_.end()) return {};
  return it->second;
}

SubcarrierMap assign_subcarriers(std::span<const Link> links, std::size_t subcarriers) {
  if (subcarriers == 0) throw Error(ErrorKind::kInvalidParameter, "need at least one subcarrier");
  SubcarrierMap map;
  std::map<ServerId, std::size_t> next;
  for (const auto& link : links) {
    auto& k = next[link.server];
    map.assign(link, k);
    k = (k + 1) % subcarriers;
  }
  return map;
}

namespace {

std::size_t require_subcarrier(Link link, const SubcarrierMap& map) {
  auto k = map.subcarrier(link);
  if (!k) {
    throw Error(ErrorKind::kLookup, "link (" + std::to_string(link.device) + ", " +
                                        std::to_string(link.server) + ") has no subcarrier");
  }
  return *k;
}

}  // namespace

double sinr(Link link, double power, const PowerAllocation& powers, const SubcarrierMap& map,
            const Topology& topo, const RadioConfig& cfg) {
  if (power < 0.0) throw Error(ErrorKind::kInvalidParameter, "transmit power must be >= 0");
  const std::size_t k = require_subcarrier(link, map);
  double interference = cfg.noise_power;
  for (const auto& other : map.cochannel(k)) {
    if (other.device == link.device) continue;
    const auto p = powers.find(other);
    if (!p) {
      throw Error(ErrorKind::kLookup,
                  "cochannel device " + std::to_string(other.device) + " has no power");
    }
    interference += p->power * topo.gain(other.device, link.server);
  }
  return topo.gain(link.device, link.server) * power / interference;
}

double rate(const RadioConfig& cfg, double sinr_value) {
  if (sinr_value < 0.0) throw Error(ErrorKind::kInvalidParameter, "sinr must be >= 0");
  return cfg.subcarrier_bandwidth() * std::log2(1.0 + sinr_value);
}

double transfer_time(double bits, double rate_bps) {
  if (!(rate_bps > 0.0)) throw Error(ErrorKind::kUnreachable, "zero rate: device unreachable");
  return bits / rate_bps;
}

void OffloadPlan::add(Link link, TransferRecord record) {
  if (index_.count(link.device) != 0) {
    throw Error(ErrorKind::kInvalidInput,
                "device " + std::to_string(link.device) + " is already offloaded");
  }
  index_[link.device] = entries_.size();
  entries_.push_back({link, record});
}

void OffloadPlan::set_record(Link link, TransferRecord record) {
  auto it = index_.find(link.device);
  if (it == index_.end() || entries_[it->second].link != link) {
    throw Error(ErrorKind::kLookup, "link not in plan");
  }
  entries_[it->second].record = record;
}

std::optional<ServerId> OffloadPlan::server_of(DeviceId u) const {
  auto it = index_.find(u);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].link.server;
}

std::vector<Link> OffloadPlan::links() const {
  std::vector<Link> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.link);
  return out;
}

std::vector<DeviceId> OffloadPlan::devices_of(ServerId s) const {
  std::vector<DeviceId> out;
  for (const auto& e : entries_) {
    if (e.link.server == s) out.push_back(e.link.device);
  }
  return out;
}

TransferRecord evaluate_link(Link link, const PowerAllocation& powers, const SubcarrierMap& map,
                             const Topology& topo, const RadioConfig& cfg) {
  const auto own = powers.find(link);
  if (!own) {
    throw Error(ErrorKind::kIncompleteAllocation,
                "no power for link (" + std::to_string(link.device) + ", " +
                    std::to_string(link.server) + ")");
  }
  TransferRecord rec;
  rec.power = own->power;
  rec.rate = rate(cfg, sinr(link, own->power, powers, map, topo, cfg));
  rec.time = transfer_time(static_cast<double>(topo.device(link.device).data_bits), rec.rate);
  rec.energy = rec.power * rec.time;
  return rec;
}

double system_cost(const OffloadPlan& plan, const PowerAllocation& powers, const Topology& topo,
                   const RadioConfig& cfg, const SubcarrierMap& map) {
  double total = 0.0;
  for (const auto& e : plan.entries()) total += evaluate_link(e.link, powers, map, topo, cfg).energy;
  return total;
}

}  // namespace flocoff
