#include "flocoff/power.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flocoff/error.hpp"

namespace flocoff {

void PairParams::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kInvalidParameter, "epsilon must be > 0");
  if (!(kappa > 0.0)) throw Error(ErrorKind::kInvalidParameter, "kappa must be > 0");
  if (!(p_min > 0.0) || !(p_min < p_max)) {
    throw Error(ErrorKind::kInvalidParameter, "need 0 < p_min < p_max");
  }
}

double effective_interference(Link link, const SubcarrierMap& map, const Topology& topo,
                              const RadioConfig& cfg) {
  const auto k = map.subcarrier(link);
  if (!k) {
    throw Error(ErrorKind::kLookup, "link (" + std::to_string(link.device) + ", " +
                                        std::to_string(link.server) + ") has no subcarrier");
  }
  double sigma_hat = cfg.noise_power;
  for (const auto& other : map.cochannel(*k)) {
    if (other.device == link.device) continue;
    sigma_hat += cfg.rated_power * topo.gain(other.device, link.server);
  }
  return sigma_hat;
}

PairParams pair_params(Link link, const SubcarrierMap& map, const Topology& topo,
                       const RadioConfig& cfg) {
  PairParams params;
  params.epsilon = static_cast<double>(topo.device(link.device).data_bits) / cfg.subcarrier_bandwidth();
  params.kappa = topo.gain(link.device, link.server) / effective_interference(link, map, topo, cfg);
  params.p_min = cfg.p_min;
  params.p_max = cfg.p_max;
  return params;
}

double objective(const PairParams& params, double p) {
  if (!(p > 0.0)) throw Error(ErrorKind::kInvalidParameter, "objective needs p > 0");
  return params.epsilon * p / std::log2(1.0 + params.kappa * p);
}

double feasibility(const PairParams& params, double p, double t) {
  return params.epsilon * p - t * std::log2(1.0 + params.kappa * p);
}

GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                            double hi, double tol) {
  if (!(hi >= lo)) throw Error(ErrorKind::kInvalidParameter, "golden section needs lo <= hi");
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidParameter, "golden section needs tol > 0");
  constexpr int kMaxGoldenIterations = 200;
  constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio
  GoldenSectionResult out;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  out.evaluations = 2;
  for (int iter = 0; b - a > tol && iter < kMaxGoldenIterations; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++out.evaluations;
  }
  // The endpoints are candidates too: the minimum of a convex function on a
  // box is often at the boundary.
  double best_x = c, best_f = fc;
  if (fd < best_f) { best_x = d; best_f = fd; }
  const double fa = f(a), fb = f(b);
  out.evaluations += 2;
  if (fa < best_f) { best_x = a; best_f = fa; }
  if (fb < best_f) { best_x = b; best_f = fb; }
  out.x = best_x;
  out.value = best_f;
  return out;
}

namespace {

PowerSolution bisect(const PairParams& params, double l, double r, double tol) {
  PowerSolution sol;
  sol.power = params.p_min;
  sol.value = r;
  const double golden_tol = std::max(1e-12, (params.p_max - params.p_min) * 1e-12);
  while (r - l > tol) {
    const double m = 0.5 * (l + r);
    if (!(m > l && m < r)) break;  // bracket below floating-point resolution
    const auto inner = golden_section_minimize(
        [&](double p) { return feasibility(params, p, m); }, params.p_min, params.p_max,
        golden_tol);
    ++sol.iterations;
    if (inner.value <= 0.0) {
      r = m;
      sol.power = inner.x;
    } else {
      l = m;
    }
  }
  sol.value = r;
  return sol;
}

double lower_start(const PairParams& params) {
  // objective(p) -> epsilon ln2 / kappa as p -> 0+, and objective is
  // increasing, so this sits strictly below every attainable value.
  return params.epsilon * std::numbers::ln2 / params.kappa * (1.0 - 1e-6);
}

}  // namespace

PowerSolution mcc_ra(const PairParams& params, double tol) {
  params.validate();
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidParameter, "tolerance must be > 0");
  return bisect(params, lower_start(params), objective(params, params.p_min), tol);
}

PowerSolution mcc_ra(const PairParams& params) {
  params.validate();
  const double l = lower_start(params);
  const double r = objective(params, params.p_min);
  return bisect(params, l, r, kDefaultRelativeTolerance * (r - l));
}

QuasiconvexityReport quasiconvexity_probe(const std::function<double(double)>& f, double lo,
                                          double hi, std::size_t num_samples) {
  if (num_samples < 3) throw Error(ErrorKind::kInvalidParameter, "probe needs at least 3 samples");
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::kInvalidParameter, "probe needs 0 < lo < hi");
  QuasiconvexityReport report;
  report.grid.resize(num_samples);
  report.values.resize(num_samples);
  const double log_lo = std::log(lo), log_hi = std::log(hi);
  for (std::size_t i = 0; i < num_samples; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(num_samples - 1);
    report.grid[i] = i == 0                ? lo
                     : i + 1 == num_samples ? hi
                                            : std::exp(log_lo + frac * (log_hi - log_lo));
    report.values[i] = f(report.grid[i]);
  }
  // f_j above both min(f_0..f_{j-1}) and min(f_{j+1}..f_{n-1}) means the
  // sublevel set {f <= f_j - slack} has a hole at j.
  const auto& v = report.values;
  std::vector<double> right_min(num_samples);
  right_min[num_samples - 1] = v[num_samples - 1];
  for (std::size_t i = num_samples - 1; i-- > 0;) right_min[i] = std::min(v[i], right_min[i + 1]);
  double left_min = v[0];
  for (std::size_t j = 1; j + 1 < num_samples; ++j) {
    const double slack = 1e-12 * std::abs(v[j]);
    if (v[j] > left_min + slack && v[j] > right_min[j + 1] + slack) ++report.violations;
    left_min = std::min(left_min, v[j]);
  }
  report.unimodal = report.violations == 0;
  return report;
}

QuasiconvexityReport quasiconvexity_probe(const PairParams& params, std::size_t num_samples) {
  params.validate();
  return quasiconvexity_probe([&](double p) { return objective(params, p); }, params.p_min,
                              params.p_max, num_samples);
}

PowerAllocation allocate_powers(std::span<const Link> links, const SubcarrierMap& map,
                                const Topology& topo, const RadioConfig& cfg) {
  PowerAllocation out;
  for (const auto& link : links) {
    const auto params = pair_params(link, map, topo, cfg);
    const auto sol = mcc_ra(params);
    out.set(link, {sol.power, objective(params, sol.power)});
  }
  return out;
}

PowerAllocation fixed_powers(std::span<const Link> links, double power, const SubcarrierMap& map,
                             const Topology& topo, const RadioConfig& cfg) {
  if (!(power > 0.0)) throw Error(ErrorKind::kInvalidParameter, "fixed power must be > 0");
  PowerAllocation out;
  for (const auto& link : links) {
    const auto params = pair_params(link, map, topo, cfg);
    out.set(link, {power, objective(params, power)});
  }
  return out;
}

}  // namespace flocoff
