#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "flocoff/network.hpp"
#include "flocoff/types.hpp"

namespace flocoff {

// One decoupled per-pair power problem:
//   minimize epsilon * p / log2(1 + kappa * p)  over  p_min <= p <= p_max
// epsilon = d_u / B_k and kappa = h_us / sigma_hat_u^2.
struct PairParams {
  double epsilon = 1.0;
  double kappa = 1.0;
  double p_min = 1e-3;
  double p_max = 1.0;

  void validate() const;
};

// sigma^2 + sum_{v in I^k \ u} P_v h_vs with every cochannel transmitter at
// the rated power. kLookup when the link has no subcarrier.
double effective_interference(Link link, const SubcarrierMap& map, const Topology& topo,
                              const RadioConfig& cfg);

PairParams pair_params(Link link, const SubcarrierMap& map, const Topology& topo,
                       const RadioConfig& cfg);

// epsilon p / log2(1 + kappa p). kInvalidParameter when p <= 0.
double objective(const PairParams& params, double p);

// phi_t(p) = epsilon p - t log2(1 + kappa p); phi_t(p) <= 0 iff objective(p) <= t.
double feasibility(const PairParams& params, double p, double t);

struct GoldenSectionResult {
  double x = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
};

// Minimizes a unimodal f on [lo, hi] until the bracket is narrower than tol.
GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                            double hi, double tol);

struct PowerSolution {
  double power = 0.0;  // p*
  double value = 0.0;  // upper end of the final bracket, J
  std::size_t iterations = 0;
};

// Bisection on the objective level t. Starts from l just below the analytic
// infimum epsilon ln2 / kappa and r = objective(p_min); each step minimizes
// the convex phi_t over [p_min, p_max] and moves r on feasibility, l
// otherwise. Stops when r - l <= tol. kInvalidParameter when tol <= 0.
PowerSolution mcc_ra(const PairParams& params, double tol);
// tol = kDefaultRelativeTolerance * (r0 - l0)
PowerSolution mcc_ra(const PairParams& params);

inline constexpr double kDefaultRelativeTolerance = 1e-9;

struct QuasiconvexityReport {
  bool unimodal = true;
  std::size_t violations = 0;
  std::vector<double> grid;
  std::vector<double> values;
};

// Samples f on a log-spaced grid over [lo, hi] and flags every interior
// point that sits above the lowest value on both sides of it (a sublevel
// set that is not an interval). Needs num_samples >= 3.
QuasiconvexityReport quasiconvexity_probe(const std::function<double(double)>& f, double lo,
                                          double hi, std::size_t num_samples);
QuasiconvexityReport quasiconvexity_probe(const PairParams& params, std::size_t num_samples);

// MCC-RA on every link, each against its own rated-power interference.
PowerAllocation allocate_powers(std::span<const Link> links, const SubcarrierMap& map,
                                const Topology& topo, const RadioConfig& cfg);

// Every link at the same fixed power, with the matching objective energy.
PowerAllocation fixed_powers(std::span<const Link> links, double power,
                             const SubcarrierMap& map, const Topology& topo,
                             const RadioConfig& cfg);

}  // namespace flocoff
