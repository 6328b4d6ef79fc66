#include <cmath>
#include <set>

#include "doctest.h"
#include "flocoff/network.hpp"
#include "flocoff/power.hpp"
#include "support.hpp"

using namespace flocoff;

namespace {

// Two cells, one device in each, with hand-picked gains.
//   h(0,0) = 1e-9, h(1,0) = 2e-13, h(0,1) = 3e-13, h(1,1) = 4e-9
Topology two_cells(std::int64_t bits = 1'000'000) {
  std::vector<EdgeServer> servers{{0, {0, 0}}, {1, {100, 0}}};
  std::vector<UserDevice> devices(2);
  for (std::size_t u = 0; u < 2; ++u) {
    devices[u].id = u;
    devices[u].home = u;
    devices[u].position = {u * 100.0 + 5.0, 0.0};
    devices[u].data_bits = bits;
  }
  return Topology(servers, devices, 60.0, {1e-9, 3e-13, 2e-13, 4e-9});
}

RadioConfig radio() {
  RadioConfig cfg;
  cfg.noise_power = 1e-13;
  return cfg;
}

}  // namespace

TEST_CASE("single cell keeps every device within the radius") {
  Rng rng = make_stream(1, "topology");
  const auto topo = place_topology(1, 200, 50.0, ChannelModel{}, rng);
  CHECK(topo.num_devices() == 200);
  for (const auto& d : topo.devices()) {
    CHECK(distance(d.position, topo.server(0).position) <= 50.0);
    CHECK(d.home == 0);
  }
}

TEST_CASE("ten cells of a hundred devices maps every device to its home cell") {
  Rng rng = make_stream(2, "topology");
  const auto topo = place_topology(10, 100, 250.0, ChannelModel{}, rng);
  CHECK(topo.num_servers() == 10);
  CHECK(topo.num_devices() == 1000);
  std::vector<int> per_cell(10, 0);
  for (const auto& d : topo.devices()) {
    CHECK(topo.nearest_server(d.position) == d.home);
    CHECK(distance(d.position, topo.server(d.home).position) <= 250.0);
    ++per_cell[d.home];
  }
  for (int n : per_cell) CHECK(n == 100);
  for (double h : topo.gains()) CHECK(h > 0.0);
}

TEST_CASE("hexagonal centers are one inter-site distance apart") {
  const double r = 10.0;
  const auto c = hex_cell_centers(7, r);
  REQUIRE(c.size() == 7);
  CHECK(c[0] == Position{0, 0});
  for (std::size_t i = 1; i < 7; ++i) {
    CHECK(distance(c[0], c[i]) == doctest::Approx(r * std::sqrt(3.0)));
  }
  std::set<std::pair<double, double>> unique;
  for (const auto& p : hex_cell_centers(19, r)) unique.insert({std::round(p.x * 1e6), std::round(p.y * 1e6)});
  CHECK(unique.size() == 19);
}

TEST_CASE("placement is deterministic") {
  Rng a = make_stream(3, "topology"), b = make_stream(3, "topology");
  CHECK(place_topology(4, 12, 30.0, ChannelModel{}, a) == place_topology(4, 12, 30.0, ChannelModel{}, b));
  Rng c = make_stream(4, "topology");
  Rng d = make_stream(3, "topology");
  CHECK_FALSE(place_topology(4, 12, 30.0, ChannelModel{}, c) == place_topology(4, 12, 30.0, ChannelModel{}, d));
}

TEST_CASE("placement argument checks") {
  Rng rng = make_stream(1, "t");
  CHECK_ERROR_KIND(place_topology(0, 3, 10.0, ChannelModel{}, rng), ErrorKind::kInvalidParameter);
  CHECK_ERROR_KIND(place_topology(2, 0, 10.0, ChannelModel{}, rng), ErrorKind::kInvalidParameter);
  CHECK_ERROR_KIND(place_topology(2, 3, 0.0, ChannelModel{}, rng), ErrorKind::kInvalidParameter);
}

TEST_CASE("channel gain") {
  Rng rng = make_stream(5, "t");
  ChannelModel still;
  still.fading = false;
  CHECK(channel_gain(still.reference_distance, still, rng) == still.reference_gain);
  ChannelModel square = still;
  square.exponent = 2.0;
  CHECK(channel_gain(20.0, square, rng) == doctest::Approx(channel_gain(10.0, square, rng) / 4.0));
  CHECK_ERROR_KIND(channel_gain(0.0, still, rng), ErrorKind::kInvalidParameter);
  CHECK_ERROR_KIND(channel_gain(-1.0, still, rng), ErrorKind::kInvalidParameter);
}

TEST_CASE("Rayleigh fading has unit mean") {
  Rng rng = make_stream(6, "t");
  ChannelModel m;
  m.reference_gain = 1.0;
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += channel_gain(1.0, m, rng);
  CHECK(std::abs(sum / n - 1.0) < 0.03);
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(-100.0) == doctest::Approx(1e-13));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3));
}

TEST_CASE("subcarrier assignment") {
  SUBCASE("one pair is alone on its subcarrier") {
    const std::vector<Link> links{{0, 0}};
    const auto map = assign_subcarriers(links, 4);
    CHECK(map.subcarrier({0, 0}) == std::optional<std::size_t>(0));
    CHECK(map.cochannel(0).size() == 1);
  }
  SUBCASE("two cells reuse subcarrier 0") {
    const std::vector<Link> links{{0, 0}, {1, 1}};
    const auto map = assign_subcarriers(links, 4);
    CHECK(map.subcarrier({0, 0}) == std::optional<std::size_t>(0));
    CHECK(map.subcarrier({1, 1}) == std::optional<std::size_t>(0));
    CHECK(map.cochannel(0).size() == 2);
  }
  SUBCASE("no sharing inside a cell while K suffices") {
    std::vector<Link> links;
    for (DeviceId u = 0; u < 8; ++u) links.push_back({u, u % 2});
    const auto map = assign_subcarriers(links, 4);
    for (std::size_t k = 0; k < 4; ++k) {
      std::set<ServerId> cells;
      for (const auto& l : map.cochannel(k)) CHECK(cells.insert(l.server).second);
    }
  }
  SUBCASE("wraps around past K") {
    std::vector<Link> links;
    for (DeviceId u = 0; u < 5; ++u) links.push_back({u, 0});
    const auto map = assign_subcarriers(links, 2);
    CHECK(map.subcarrier({4, 0}) == std::optional<std::size_t>(0));
    CHECK(map.cochannel(0).size() == 3);
    CHECK(map.cochannel(1).size() == 2);
  }
  SUBCASE("cochannel sets agree with the assignment") {
    std::vector<Link> links;
    for (DeviceId u = 0; u < 30; ++u) links.push_back({u, u % 3});
    const auto map = assign_subcarriers(links, 7);
    std::size_t seen = 0;
    for (std::size_t k = 0; k < 7; ++k) {
      for (const auto& l : map.cochannel(k)) {
        CHECK(map.subcarrier(l) == std::optional(k));
        ++seen;
      }
    }
    CHECK(seen == links.size());
  }
  CHECK_ERROR_KIND(assign_subcarriers({}, 0), ErrorKind::kInvalidParameter);
}

TEST_CASE("sinr") {
  const auto topo = two_cells();
  const auto cfg = radio();
  SUBCASE("no cochannel user") {
    const std::vector<Link> links{{0, 0}};
    const auto map = assign_subcarriers(links, 4);
    CHECK(sinr({0, 0}, 0.0, {}, map, topo, cfg) == 0.0);
    CHECK(sinr({0, 0}, 0.5, {}, map, topo, cfg) == doctest::Approx(5000.0).epsilon(1e-12));
  }
  SUBCASE("a cochannel transmitter lowers sinr") {
    const std::vector<Link> links{{0, 0}, {1, 1}};
    const auto map = assign_subcarriers(links, 4);
    PowerAllocation powers;
    powers.set({0, 0}, {0.5, 0.0});
    powers.set({1, 1}, {0.5, 0.0});
    const double with = sinr({0, 0}, 0.5, powers, map, topo, cfg);
    // h(1,0) = 2e-13 at 0.5 W doubles the noise floor
    CHECK(with == doctest::Approx(1e-9 * 0.5 / (1e-13 + 0.5 * 2e-13)).epsilon(1e-12));
    const std::vector<Link> lone{{0, 0}};
    CHECK(with < sinr({0, 0}, 0.5, powers, assign_subcarriers(lone, 4), topo, cfg));
  }
  SUBCASE("monotone in own and cochannel power") {
    const std::vector<Link> links{{0, 0}, {1, 1}};
    const auto map = assign_subcarriers(links, 4);
    double last_own = -1.0;
    for (double p = 0.01; p <= 1.0; p += 0.01) {
      PowerAllocation powers;
      powers.set({1, 1}, {0.3, 0.0});
      const double s = sinr({0, 0}, p, powers, map, topo, cfg);
      CHECK(s > last_own);
      last_own = s;
    }
    double last_other = INFINITY;
    for (double q = 0.0; q <= 1.0; q += 0.05) {
      PowerAllocation powers;
      powers.set({1, 1}, {q, 0.0});
      const double s = sinr({0, 0}, 0.4, powers, map, topo, cfg);
      CHECK(s <= last_other);
      last_other = s;
    }
  }
  SUBCASE("lookups") {
    const std::vector<Link> links{{0, 0}, {1, 1}};
    const auto map = assign_subcarriers(links, 4);
    CHECK_ERROR_KIND(sinr({1, 0}, 0.5, {}, map, topo, cfg), ErrorKind::kLookup);
    CHECK_ERROR_KIND(sinr({0, 0}, 0.5, {}, map, topo, cfg), ErrorKind::kLookup);
  }
}

TEST_CASE("rate and transfer time") {
  const auto cfg = radio();
  const double bk = 5e6 / 128;
  CHECK(bk == 39062.5);
  CHECK(rate(cfg, 0.0) == 0.0);
  CHECK(rate(cfg, 1.0) == doctest::Approx(bk));
  CHECK(rate(cfg, 3.0) == doctest::Approx(2 * bk));
  double last = 0.0;
  for (double s = 0.1; s < 100; s *= 1.5) {
    CHECK(rate(cfg, s) > last);
    last = rate(cfg, s);
  }
  CHECK(transfer_time(1234.5, 1234.5) == 1.0);
  CHECK(transfer_time(0.0, 10.0) == 0.0);
  const double sinr_value = 5000.0;
  const double hand = 1e6 / (39062.5 * std::log2(1.0 + sinr_value));
  CHECK(transfer_time(1e6, rate(cfg, sinr_value)) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(transfer_time(1e6, 2e5) < transfer_time(1e6, 1e5));
  CHECK_ERROR_KIND(transfer_time(10.0, 0.0), ErrorKind::kUnreachable);
}

TEST_CASE("system cost") {
  const auto topo = two_cells();
  const auto cfg = radio();
  CHECK(system_cost(OffloadPlan{}, {}, topo, cfg, SubcarrierMap{}) == 0.0);

  SUBCASE("single pair is power times time") {
    // Pick bits so the transfer takes exactly 2 s at 0.5 W.
    const double r = rate(cfg, 5000.0);
    const auto t = two_cells(static_cast<std::int64_t>(0));
    std::vector<UserDevice> devices(t.devices().begin(), t.devices().end());
    const double bits = 2.0 * r;
    devices[0].data_bits = static_cast<std::int64_t>(bits);
    const Topology topo2(std::vector<EdgeServer>(t.servers().begin(), t.servers().end()), devices,
                         60.0, std::vector<double>(t.gains().begin(), t.gains().end()));
    OffloadPlan plan;
    plan.add({0, 0});
    const std::vector<Link> links{{0, 0}};
    const auto map = assign_subcarriers(links, 4);
    PowerAllocation powers;
    powers.set({0, 0}, {0.5, 0.0});
    const double expected = 0.5 * static_cast<double>(devices[0].data_bits) / r;
    CHECK(expected == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(system_cost(plan, powers, topo2, cfg, map) == doctest::Approx(expected).epsilon(1e-14));
  }

  SUBCASE("additive over disjoint plans") {
    const std::vector<Link> links{{0, 0}, {1, 1}};
    const auto map = assign_subcarriers(links, 4);
    PowerAllocation powers;
    powers.set({0, 0}, {0.7, 0.0});
    powers.set({1, 1}, {0.2, 0.0});
    OffloadPlan both, first, second;
    both.add({0, 0});
    both.add({1, 1});
    first.add({0, 0});
    second.add({1, 1});
    CHECK(system_cost(both, powers, topo, cfg, map) ==
          doctest::Approx(system_cost(first, powers, topo, cfg, map) +
                          system_cost(second, powers, topo, cfg, map))
              .epsilon(1e-14));
  }

  SUBCASE("missing power") {
    OffloadPlan plan;
    plan.add({0, 0});
    const std::vector<Link> links{{0, 0}};
    CHECK_ERROR_KIND(system_cost(plan, {}, topo, cfg, assign_subcarriers(links, 4)),
                     ErrorKind::kIncompleteAllocation);
  }
}

TEST_CASE("max power never beats the optimized powers") {
  Rng rng = make_stream(8, "topology");
  RadioConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    auto topo = place_topology(3, 6, 40.0, ChannelModel{}, rng);
    std::vector<LabelDistribution> dists(topo.num_devices(), LabelDistribution({60, 40}));
    topo = topo.with_device_data(dists, 520);
    OffloadPlan plan;
    for (const auto& d : topo.devices()) plan.add({d.id, d.home});
    const auto links = plan.links();
    const auto map = assign_subcarriers(links, 4);
    const double optimized = system_cost(plan, allocate_powers(links, map, topo, cfg), topo, cfg, map);
    const double maxed =
        system_cost(plan, fixed_powers(links, cfg.p_max, map, topo, cfg), topo, cfg, map);
    CHECK(maxed >= optimized);
  }
}

TEST_CASE("offload plan bookkeeping") {
  OffloadPlan plan;
  plan.add({3, 1});
  plan.add({1, 0});
  plan.add({2, 1});
  CHECK(plan.server_of(3) == std::optional<ServerId>(1));
  CHECK_FALSE(plan.server_of(0).has_value());
  CHECK(plan.devices_of(1) == std::vector<DeviceId>{3, 2});
  CHECK(plan.links() == std::vector<Link>{{3, 1}, {1, 0}, {2, 1}});
  CHECK_ERROR_KIND(plan.add({3, 0}), ErrorKind::kInvalidInput);
  CHECK_ERROR_KIND(plan.set_record({3, 0}, {}), ErrorKind::kLookup);
  plan.set_record({3, 1}, {0.5, 1.0, 2.0, 1.0});
  CHECK(plan.entries()[0].record.energy == 1.0);
}

TEST_CASE("topology json round trip is exact") {
  Rng rng = make_stream(9, "topology");
  auto topo = place_topology(3, 5, 40.0, ChannelModel{}, rng);
  Rng data = make_stream(9, "data");
  std::vector<LabelDistribution> dists;
  std::uniform_int_distribution<std::int64_t> count(0, 90);
  for (std::size_t u = 0; u < topo.num_devices(); ++u) dists.emplace_back(std::vector<std::int64_t>{count(data), count(data), count(data)});
  topo = topo.with_device_data(dists, 520);
  const auto text = topology_to_json(topo);
  const auto back = topology_from_json(text);
  CHECK(back == topo);
  CHECK(topology_to_json(back) == text);
  CHECK_ERROR_KIND(topology_from_json("{\"servers\": 3}"), ErrorKind::kInvalidInput);
  CHECK_ERROR_KIND(topology_from_json("not json"), ErrorKind::kInvalidInput);
}

TEST_CASE("topology validation") {
  std::vector<EdgeServer> servers{{0, {0, 0}}};
  std::vector<UserDevice> devices(1);
  CHECK_ERROR_KIND(Topology(servers, devices, 1.0, {}), ErrorKind::kDimension);
  CHECK_ERROR_KIND(Topology(servers, devices, 1.0, {0.0}), ErrorKind::kInvalidParameter);
  devices[0].home = 4;
  CHECK_ERROR_KIND(Topology(servers, devices, 1.0, {1.0}), ErrorKind::kInvalidInput);
  const auto topo = two_cells();
  CHECK(topo.nearest_server({50.0, 0.0}) == 0);  // equidistant: lower id
  CHECK(topo.nearest_server({51.0, 0.0}) == 1);
}

TEST_CASE("radio config validation") {
  RadioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.subcarriers = 0;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::kInvalidParameter);
  bad = cfg;
  bad.rated_power = 2.0;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::kInvalidParameter);
  bad = cfg;
  bad.noise_power = 0.0;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::kInvalidParameter);
  bad = cfg;
  bad.p_min = 2.0;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::kInvalidParameter);
  CHECK(cfg.subcarrier_bandwidth() == 39062.5);
}
