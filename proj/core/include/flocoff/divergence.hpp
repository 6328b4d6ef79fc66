#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flocoff/distributions.hpp"
#include "flocoff/federated.hpp"

namespace flocoff {

// sum_c p[c] ln(p[c] / q[c]) with 0 ln(0/q) = 0. Natural log.
double kl(const ProbabilityVector& p, const ProbabilityVector& q);

// max(global[c] - server[c], 0) per class.
LabelDistribution complement(const LabelDistribution& global, const LabelDistribution& server);

// ||grad F_server(w) - grad F_global(w)|| over the flattened parameters.
double gradient_divergence(const ModelParams& w, const Dataset& server_data,
                           const Dataset& global_data);

// Smoothness constant of the mean softmax cross-entropy on `data`:
// (max_i ||x_i||^2 + 1) / 2. The +1 accounts for the bias column and 1/2
// bounds the largest eigenvalue of diag(p) - p p^T.
double lipschitz_constant(const Dataset& data);

struct SmoothnessEstimate {
  std::vector<double> per_server;  // L_s
  double global = 0.0;             // sum |D_s| L_s / |D|
};

SmoothnessEstimate lipschitz_bound(std::span<const Dataset> server_datasets);

// prev_dist + phi * sum_s |D_s| gamma_s (phi L_s + 1)^t / |D|
double divergence_bound(double prev_dist, double phi, std::span<const double> sizes,
                      std::span<const double> gammas, std::span<const double> smoothness,
                      std::size_t t);

struct DivergenceRound {
  std::size_t round = 0;
  double lhs = 0.0;  // ||w - v||
  double rhs = 0.0;  // bound
  bool holds = true;
};

struct DivergenceReport {
  std::vector<DivergenceRound> per_round;

  bool all_hold() const;
  double fraction_holding() const;
};

// gammas[t-1][s]: gradient divergence of server s at the global model that
// starts round t, w[t-1].
std::vector<std::vector<double>> measure_gammas(const PairedRun& run,
                                                std::span<const Dataset> server_datasets,
                                                const Dataset& global_data);

// Per round t, lhs = ||w[t] - v[t]|| and rhs = divergence_bound with
// prev_dist = ||w[t-1] - v[t-1]|| and gamma_s the running maximum of the
// observed divergences up to round t. kInvalidComparison when the run's
// trajectories or the supplied per-round inputs disagree in length.
DivergenceReport audit_divergence_bound(const PairedRun& run,
                                const std::vector<std::vector<double>>& gammas,
                                std::span<const double> smoothness);

// Average ranks (1-based, ties averaged).
std::vector<double> ranks(std::span<const double> values);
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace flocoff
