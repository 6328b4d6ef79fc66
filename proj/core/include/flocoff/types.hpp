#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace flocoff {

using DeviceId = std::size_t;
using ServerId = std::size_t;

// One offloading pair (u, s).
struct Link {
  DeviceId device = 0;
  ServerId server = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

struct PairPower {
  double power = 0.0;   // p_us, Watts
  double energy = 0.0;  // objective value at power, Joules

  friend bool operator==(const PairPower&, const PairPower&) = default;
};

// Per-pair transmit powers p_us.
class PowerAllocation {
 public:
  void set(Link link, PairPower value) { powers_[link] = value; }

  std::optional<PairPower> find(Link link) const {
    auto it = powers_.find(link);
    if (it == powers_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(Link link) const { return powers_.count(link) != 0; }
  std::size_t size() const { return powers_.size(); }
  bool empty() const { return powers_.empty(); }

  auto begin() const { return powers_.begin(); }
  auto end() const { return powers_.end(); }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;

 private:
  std::map<Link, PairPower> powers_;
};

}  // namespace flocoff
