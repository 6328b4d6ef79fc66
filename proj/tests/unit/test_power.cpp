#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "flocoff/power.hpp"
#include "support.hpp"

using namespace flocoff;

namespace {

PairParams params_of(double epsilon, double kappa) {
  PairParams p;
  p.epsilon = epsilon;
  p.kappa = kappa;
  return p;
}

// eps log-uniform over [1e-2, 1e2], kappa over [1e-1, 1e6]
PairParams random_params(Rng& rng) {
  std::uniform_real_distribution<double> e(-2.0, 2.0), k(-1.0, 6.0);
  return params_of(std::pow(10.0, e(rng)), std::pow(10.0, k(rng)));
}

// Brute force over a uniform grid, endpoints included.
double grid_minimum(const PairParams& params, std::size_t points) {
  double best = INFINITY;
  const double step = (params.p_max - params.p_min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double p = i + 1 == points ? params.p_max : params.p_min + step * static_cast<double>(i);
    best = std::min(best, params.epsilon * p / std::log2(1.0 + params.kappa * p));
  }
  return best;
}

Topology two_cells() {
  std::vector<EdgeServer> servers{{0, {0, 0}}, {1, {100, 0}}};
  std::vector<UserDevice> devices(2);
  for (std::size_t u = 0; u < 2; ++u) {
    devices[u].id = u;
    devices[u].home = u;
    devices[u].data_bits = 100'000;
  }
  return Topology(servers, devices, 60.0, {1e-9, 3e-13, 2e-13, 4e-9});
}

}  // namespace

TEST_CASE("effective interference") {
  const auto topo = two_cells();
  RadioConfig cfg;
  const std::vector<Link> lone{{0, 0}};
  CHECK(effective_interference({0, 0}, assign_subcarriers(lone, 4), topo, cfg) == cfg.noise_power);
  const std::vector<Link> both{{0, 0}, {1, 1}};
  const auto map = assign_subcarriers(both, 4);
  CHECK(effective_interference({0, 0}, map, topo, cfg) == doctest::Approx(1e-13 + 0.5 * 2e-13));
  CHECK(effective_interference({1, 1}, map, topo, cfg) == doctest::Approx(1e-13 + 0.5 * 3e-13));
  CHECK_ERROR_KIND(effective_interference({1, 0}, map, topo, cfg), ErrorKind::kLookup);

  const auto params = pair_params({0, 0}, map, topo, cfg);
  CHECK(params.epsilon == doctest::Approx(100'000 / 39062.5));
  CHECK(params.kappa == doctest::Approx(1e-9 / 2e-13));
}

TEST_CASE("objective values") {
  CHECK(objective(params_of(1, 1), 1.0) == 1.0);
  CHECK(objective(params_of(1, 3), 1.0) == 0.5);
  for (double kappa : {1.0, 3.0, 0.02}) {
    const auto params = params_of(2.0, kappa);
    const double limit = 2.0 * std::numbers::ln2 / kappa;
    CHECK(std::abs(objective(params, 1e-9) / limit - 1.0) < 1e-6);
  }
  CHECK_ERROR_KIND(objective(params_of(1, 1), 0.0), ErrorKind::kInvalidParameter);
  CHECK_ERROR_KIND(objective(params_of(1, 1), -1.0), ErrorKind::kInvalidParameter);
}

TEST_CASE("objective increases with power") {
  Rng rng = make_stream(1, "power/triples");
  std::uniform_real_distribution<double> lp(-6.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto params = random_params(rng);
    double p1 = std::pow(10.0, lp(rng)), p2 = std::pow(10.0, lp(rng));
    if (p1 > p2) std::swap(p1, p2);
    if (p2 < p1 * (1.0 + 1e-9)) continue;
    CHECK(objective(params, p1) < objective(params, p2));
    // sign of the derivative numerator
    const double x = params.kappa * p1;
    CHECK(std::log1p(x) * (1.0 + x) - x > 0.0);
  }
}

TEST_CASE("feasibility") {
  const auto params = params_of(1.5, 40.0);
  for (double p : {0.01, 0.2, 0.9}) {
    CHECK(std::abs(feasibility(params, p, objective(params, p))) < 1e-12);
    CHECK(feasibility(params, p, 0.0) == doctest::Approx(1.5 * p));
    CHECK(feasibility(params, p, 0.0) > 0.0);
    CHECK((feasibility(params, p, objective(params, p) * 1.01) < 0.0));
  }
  bool somewhere = false;
  for (double p = 0.01; p < 1.0; p += 0.01) somewhere |= feasibility(params, p, 1.5 * 1.0 * 10) < 0.0;
  CHECK(somewhere);
}

TEST_CASE("feasibility is convex in power") {
  Rng rng = make_stream(2, "power/convex");
  std::uniform_real_distribution<double> lp(-6.0, 1.0), lt(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const auto params = random_params(rng);
    const double a = std::pow(10.0, lp(rng)), b = std::pow(10.0, lp(rng));
    const double t = std::pow(10.0, lt(rng));
    const double mid = feasibility(params, 0.5 * (a + b), t);
    const double chord = 0.5 * (feasibility(params, a, t) + feasibility(params, b, t));
    CHECK(mid <= chord + 1e-12 * (std::abs(chord) + 1.0));
  }
}

TEST_CASE("golden section") {
  const auto r = golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-10);
  CHECK(r.x == doctest::Approx(0.3).epsilon(1e-8));
  const auto edge = golden_section_minimize([](double x) { return x; }, 2.0, 5.0, 1e-9);
  CHECK(edge.x == 2.0);
  CHECK(edge.value == 2.0);
  CHECK_ERROR_KIND(golden_section_minimize([](double x) { return x; }, 1.0, 0.0, 1e-9),
                   ErrorKind::kInvalidParameter);
  CHECK_ERROR_KIND(golden_section_minimize([](double x) { return x; }, 0.0, 1.0, 0.0),
                   ErrorKind::kInvalidParameter);
}

TEST_CASE("mcc_ra lands on the grid minimum") {
  Rng rng = make_stream(3, "power/grid");
  const std::size_t points = 1'000'000;
  for (int i = 0; i < 10; ++i) {
    const auto params = random_params(rng);
    const double tau = 1e-9;
    const auto sol = mcc_ra(params, tau);
    const double best = grid_minimum(params, points);
    const double step = (params.p_max - params.p_min) / static_cast<double>(points - 1);
    const double resolution = objective(params, params.p_min + step) - objective(params, params.p_min);
    CHECK(std::abs(sol.value - best) <= tau + resolution);
    CHECK(sol.value <= best + tau);
  }
}

TEST_CASE("mcc_ra drives power to the floor") {
  Rng rng = make_stream(4, "power/floor");
  for (int i = 0; i < 200; ++i) {
    const auto params = random_params(rng);
    const double tau = 1e-10;
    const auto sol = mcc_ra(params, tau);
    CHECK(sol.power >= params.p_min);
    CHECK(sol.power <= params.p_max);
    CHECK(sol.power == doctest::Approx(params.p_min).epsilon(1e-6));
    CHECK(std::abs(sol.value - objective(params, params.p_min)) <= tau);
    CHECK(std::abs(sol.value - objective(params, sol.power)) <= 1e-9);

    const double l0 = params.epsilon * std::numbers::ln2 / params.kappa * (1.0 - 1e-6);
    const double r0 = objective(params, params.p_min);
    CHECK(sol.iterations <= static_cast<std::size_t>(std::ceil(std::log2((r0 - l0) / tau))));
  }
}

TEST_CASE("mcc_ra default tolerance and errors") {
  const auto params = params_of(3.0, 500.0);
  const auto sol = mcc_ra(params);
  CHECK(sol.value == doctest::Approx(objective(params, params.p_min)).epsilon(1e-8));
  CHECK_ERROR_KIND(mcc_ra(params, 0.0), ErrorKind::kInvalidParameter);
  CHECK_ERROR_KIND(mcc_ra(params, -1.0), ErrorKind::kInvalidParameter);
  auto bad = params;
  bad.kappa = 0.0;
  CHECK_ERROR_KIND(mcc_ra(bad, 1e-9), ErrorKind::kInvalidParameter);
  bad = params;
  bad.p_min = 2.0;
  CHECK_ERROR_KIND(mcc_ra(bad, 1e-9), ErrorKind::kInvalidParameter);
}

TEST_CASE("quasiconvexity probe") {
  Rng rng = make_stream(5, "power/probe");
  for (int i = 0; i < 100; ++i) CHECK(quasiconvexity_probe(random_params(rng), 200).unimodal);
  CHECK(quasiconvexity_probe(params_of(1e-300, 1.0), 50).unimodal);
  CHECK(quasiconvexity_probe([](double) { return 7.0; }, 0.1, 1.0, 50).unimodal);
  CHECK(quasiconvexity_probe([](double x) { return (x - 0.4) * (x - 0.4); }, 0.01, 1.0, 50).unimodal);

  const auto params = params_of(1.0, 100.0);
  const auto bumped = [&](double p) {
    return objective(params, p) + 5.0 * std::exp(-std::pow((p - 0.1) / 0.01, 2));
  };
  const auto report = quasiconvexity_probe(bumped, params.p_min, params.p_max, 400);
  CHECK_FALSE(report.unimodal);
  CHECK(report.violations > 0);
  CHECK(report.grid.size() == 400);
  CHECK(report.grid.front() == params.p_min);
  CHECK(report.grid.back() == params.p_max);
  CHECK_ERROR_KIND(quasiconvexity_probe(params, 2), ErrorKind::kInvalidParameter);
}

TEST_CASE("allocations do not depend on pair order") {
  Rng rng = make_stream(6, "topology");
  RadioConfig cfg;
  auto topo = place_topology(4, 10, 50.0, ChannelModel{}, rng);
  std::vector<LabelDistribution> dists(topo.num_devices(), LabelDistribution({30, 70, 10}));
  topo = topo.with_device_data(dists, 520);
  std::vector<Link> links;
  for (const auto& d : topo.devices()) links.push_back({d.id, d.home});
  const auto map = assign_subcarriers(links, 3);
  const auto forward = allocate_powers(links, map, topo, cfg);
  std::shuffle(links.begin(), links.end(), rng);
  const auto shuffled = allocate_powers(links, map, topo, cfg);
  CHECK(forward == shuffled);
  CHECK(forward.size() == links.size());
  for (const auto& [link, pp] : forward) {
    CHECK(pp.power >= cfg.p_min);
    CHECK(pp.power <= cfg.p_max);
  }
  const auto fixed = fixed_powers(links, cfg.p_max, map, topo, cfg);
  for (const auto& [link, pp] : fixed) {
    CHECK(pp.power == cfg.p_max);
    CHECK(pp.energy >= forward.find(link)->energy);
  }
  CHECK_ERROR_KIND(fixed_powers(links, 0.0, map, topo, cfg), ErrorKind::kInvalidParameter);
}
