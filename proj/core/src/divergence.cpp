#include "flocoff/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flocoff/error.hpp"

namespace flocoff {

double kl(const ProbabilityVector& p, const ProbabilityVector& q) {
  if (p.size() != q.size()) throw Error(ErrorKind::kDimension, "kl: length mismatch");
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] == 0.0) continue;
    if (q[c] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[c] * std::log(p[c] / q[c]);
  }
  // Rounding can leave a tiny negative sum when p and q nearly coincide.
  return std::max(sum, 0.0);
}

LabelDistribution complement(const LabelDistribution& global, const LabelDistribution& server) {
  if (global.num_classes() != server.num_classes()) {
    throw Error(ErrorKind::kDimension, "complement: class count mismatch");
  }
  std::vector<std::int64_t> counts(global.num_classes());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    counts[c] = std::max<std::int64_t>(global[c] - server[c], 0);
  }
  return LabelDistribution(std::move(counts));
}

double gradient_divergence(const ModelParams& w, const Dataset& server_data,
                           const Dataset& global_data) {
  const auto server = loss_and_grad(w, server_data);
  const auto global = loss_and_grad(w, global_data);
  return distance(server.grad, global.grad);
}

double lipschitz_constant(const Dataset& data) {
  if (data.empty()) throw Error(ErrorKind::kInvalidInput, "lipschitz: empty dataset");
  double max_sq = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data[i].features;
    const double sq = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    max_sq = std::max(max_sq, sq);
  }
  return 0.5 * (max_sq + 1.0);
}

SmoothnessEstimate lipschitz_bound(std::span<const Dataset> server_datasets) {
  SmoothnessEstimate est;
  double total = 0.0, weighted = 0.0;
  for (const auto& d : server_datasets) {
    const double l = lipschitz_constant(d);
    est.per_server.push_back(l);
    total += static_cast<double>(d.size());
    weighted += static_cast<double>(d.size()) * l;
  }
  if (total > 0.0) est.global = weighted / total;
  return est;
}

double divergence_bound(double prev_dist, double phi, std::span<const double> sizes,
                      std::span<const double> gammas, std::span<const double> smoothness,
                      std::size_t t) {
  if (sizes.size() != gammas.size() || sizes.size() != smoothness.size()) {
    throw Error(ErrorKind::kDimension, "divergence_bound: per-server lists differ in length");
  }
  if (phi < 0.0) throw Error(ErrorKind::kInvalidParameter, "divergence_bound: phi must be >= 0");
  const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::kInvalidInput, "divergence_bound: zero total size");
  double sum = 0.0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    if (gammas[s] == 0.0) continue;
    sum += sizes[s] * gammas[s] * std::pow(phi * smoothness[s] + 1.0, static_cast<double>(t));
  }
  return prev_dist + phi * sum / total;
}

bool DivergenceReport::all_hold() const {
  return std::all_of(per_round.begin(), per_round.end(), [](const auto& r) { return r.holds; });
}

double DivergenceReport::fraction_holding() const {
  if (per_round.empty()) return 1.0;
  const auto n = std::count_if(per_round.begin(), per_round.end(), [](const auto& r) { return r.holds; });
  return static_cast<double>(n) / static_cast<double>(per_round.size());
}

std::vector<std::vector<double>> measure_gammas(const PairedRun& run,
                                                std::span<const Dataset> server_datasets,
                                                const Dataset& global_data) {
  if (server_datasets.size() != run.sizes.size()) {
    throw Error(ErrorKind::kInvalidComparison, "measure_gammas: server count mismatch");
  }
  std::vector<std::vector<double>> gammas;
  if (run.w.empty()) return gammas;
  gammas.reserve(run.w.size() - 1);
  for (std::size_t t = 1; t < run.w.size(); ++t) {
    const auto global = loss_and_grad(run.w[t - 1], global_data);
    std::vector<double> row;
    row.reserve(server_datasets.size());
    for (const auto& d : server_datasets) {
      row.push_back(distance(loss_and_grad(run.w[t - 1], d).grad, global.grad));
    }
    gammas.push_back(std::move(row));
  }
  return gammas;
}

DivergenceReport audit_divergence_bound(const PairedRun& run,
                                const std::vector<std::vector<double>>& gammas,
                                std::span<const double> smoothness) {
  if (run.w.size() != run.v.size() || run.w.size() != run.distance.size()) {
    throw Error(ErrorKind::kInvalidComparison, "audit: w and v trajectories differ in length");
  }
  if (run.w.size() != run.config.rounds + 1) {
    throw Error(ErrorKind::kInvalidComparison, "audit: trajectory length differs from the schedule");
  }
  if (gammas.size() != run.config.rounds) {
    throw Error(ErrorKind::kInvalidComparison, "audit: need one gamma row per round");
  }
  if (smoothness.size() != run.sizes.size()) {
    throw Error(ErrorKind::kDimension, "audit: one smoothness constant per server");
  }
  DivergenceReport report;
  std::vector<double> running(run.sizes.size(), 0.0);
  for (std::size_t t = 1; t <= run.config.rounds; ++t) {
    const auto& row = gammas[t - 1];
    if (row.size() != running.size()) {
      throw Error(ErrorKind::kDimension, "audit: gamma row has the wrong server count");
    }
    for (std::size_t s = 0; s < running.size(); ++s) running[s] = std::max(running[s], row[s]);
    DivergenceRound r;
    r.round = t;
    r.lhs = run.distance[t];
    r.rhs = divergence_bound(run.distance[t - 1], run.config.phi, run.sizes, running, smoothness, t);
    r.holds = r.lhs <= r.rhs + 1e-9;
    report.per_round.push_back(r);
  }
  return report;
}

std::vector<double> ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg;
    i = j + 1;
  }
  return out;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::kDimension, "spearman: length mismatch");
  if (a.size() < 2) throw Error(ErrorKind::kInvalidInput, "spearman: need at least two points");
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace flocoff
