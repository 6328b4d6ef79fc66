#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flocoff/distributions.hpp"
#include "flocoff/rng.hpp"
#include "flocoff/types.hpp"

namespace flocoff {

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(Position a, Position b);

struct EdgeServer {
  ServerId id = 0;
  Position position;

  friend bool operator==(const EdgeServer&, const EdgeServer&) = default;
};

struct UserDevice {
  DeviceId id = 0;
  Position position;
  ServerId home = 0;
  std::int64_t data_bits = 0;  // d_u
  LabelDistribution dist = LabelDistribution::zeros(2);

  friend bool operator==(const UserDevice&, const UserDevice&) = default;
};

// Log-distance path loss g0 (d0 / d)^exponent with optional Rayleigh
// (unit-mean exponential power) fading.
struct ChannelModel {
  double exponent = 3.0;
  double reference_gain = 1e-3;  // -30 dB
  double reference_distance = 1.0;
  bool fading = true;
};

// kInvalidParameter when distance <= 0.
double channel_gain(double distance, const ChannelModel& model, Rng& rng);

struct RadioConfig {
  double bandwidth = 5e6;       // B, Hz
  std::size_t subcarriers = 128;  // K
  double noise_power = 1e-13;   // sigma^2, W (-100 dBm)
  double p_max = 1.0;           // W
  double rated_power = 0.5;     // P_v, W
  double p_min = 1e-3;          // W

  void validate() const;
  double subcarrier_bandwidth() const noexcept {
    return bandwidth / static_cast<double>(subcarriers);
  }
};

double dbm_to_watts(double dbm);
double db_to_linear(double db);

class Topology {
 public:
  Topology(std::vector<EdgeServer> servers, std::vector<UserDevice> devices,
           double cell_radius, std::vector<double> gains);

  std::span<const EdgeServer> servers() const noexcept { return servers_; }
  std::span<const UserDevice> devices() const noexcept { return devices_; }
  const UserDevice& device(DeviceId u) const { return devices_.at(u); }
  const EdgeServer& server(ServerId s) const { return servers_.at(s); }
  std::size_t num_servers() const noexcept { return servers_.size(); }
  std::size_t num_devices() const noexcept { return devices_.size(); }
  double cell_radius() const noexcept { return cell_radius_; }

  // h_us
  double gain(DeviceId u, ServerId s) const { return gains_.at(u * servers_.size() + s); }
  std::span<const double> gains() const noexcept { return gains_; }

  // Nearest server; ties go to the lower id.
  ServerId nearest_server(Position p) const;

  // Copy with per-device label histograms attached; d_u = total * bits_per_sample.
  Topology with_device_data(std::span<const LabelDistribution> dists,
                            std::int64_t bits_per_sample) const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<EdgeServer> servers_;
  std::vector<UserDevice> devices_;
  double cell_radius_ = 0.0;
  std::vector<double> gains_;
};

// Hexagonal-lattice cell centers in spiral order around the origin with
// circumradius cell_radius. Devices are uniform inside their hexagon
// (nearest-server region), devices_per_server per cell; device ids run
// cell by cell.
Topology place_topology(std::size_t num_servers, std::size_t devices_per_server,
                        double cell_radius, const ChannelModel& channel, Rng& rng);

std::vector<Position> hex_cell_centers(std::size_t count, double cell_radius);

std::string topology_to_json(const Topology& topo);
Topology topology_from_json(std::string_view text);

class SubcarrierMap {
 public:
  void assign(Link link, std::size_t k);

  std::optional<std::size_t> subcarrier(Link link) const;
  // I^k: every link transmitting on subcarrier k.
  std::span<const Link> cochannel(std::size_t k) const;
  std::size_t size() const noexcept { return assignment_.size(); }

 private:
  std::map<Link, std::size_t> assignment_;
  std::map<std::size_t, std::vector<Link>> cochannel_;
};

// Round-robin over k = 0..K-1 within each cell, in the order the links
// appear.
SubcarrierMap assign_subcarriers(std::span<const Link> links, std::size_t subcarriers);

// h_us p / (sigma^2 + sum_{v in I^k \ u} p_v h_vs), with cochannel powers
// taken from `powers`. kLookup when the link has no subcarrier or a
// cochannel link has no power.
double sinr(Link link, double power, const PowerAllocation& powers, const SubcarrierMap& map,
            const Topology& topo, const RadioConfig& cfg);

// B_k log2(1 + sinr)
double rate(const RadioConfig& cfg, double sinr_value);

// d_u / rate. kUnreachable when rate == 0.
double transfer_time(double bits, double rate_bps);

struct TransferRecord {
  double power = 0.0;   // W
  double rate = 0.0;    // bit/s
  double time = 0.0;    // s
  double energy = 0.0;  // J

  friend bool operator==(const TransferRecord&, const TransferRecord&) = default;
};

struct PlanEntry {
  Link link;
  TransferRecord record;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

// Binary offloading matrix A, kept as the list of active pairs in offload
// order. A device is assigned to at most one server.
class OffloadPlan {
 public:
  // kInvalidInput when the device is already assigned.
  void add(Link link, TransferRecord record = {});
  void set_record(Link link, TransferRecord record);

  std::optional<ServerId> server_of(DeviceId u) const;
  std::span<const PlanEntry> entries() const noexcept { return entries_; }
  std::vector<Link> links() const;
  std::vector<DeviceId> devices_of(ServerId s) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const OffloadPlan&, const OffloadPlan&) = default;

 private:
  std::vector<PlanEntry> entries_;
  std::map<DeviceId, std::size_t> index_;
};

// Per-pair rate, time and energy under the given powers and cochannel map.
TransferRecord evaluate_link(Link link, const PowerAllocation& powers, const SubcarrierMap& map,
                             const Topology& topo, const RadioConfig& cfg);

// J = sum over planned pairs of p_us T_u. kIncompleteAllocation when a
// planned pair has no power.
double system_cost(const OffloadPlan& plan, const PowerAllocation& powers,
                   const Topology& topo, const RadioConfig& cfg, const SubcarrierMap& map);

}  // namespace flocoff
