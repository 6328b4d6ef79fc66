#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flocoff/distributions.hpp"
#include "flocoff/rng.hpp"

namespace flocoff {

// Multinomial softmax-regression parameters: a C x d weight matrix
// (row-major) and a length-C bias.
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(std::size_t num_classes, std::size_t dim);

  static ModelParams zeros(std::size_t num_classes, std::size_t dim) {
    return ModelParams(num_classes, dim);
  }
  static ModelParams gaussian(std::size_t num_classes, std::size_t dim, double std, Rng& rng);

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<double> weights() noexcept { return weights_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> bias() noexcept { return bias_; }
  std::span<const double> bias() const noexcept { return bias_; }

  double& weight(std::size_t c, std::size_t j) { return weights_[c * dim_ + j]; }
  double weight(std::size_t c, std::size_t j) const { return weights_[c * dim_ + j]; }

  // Flattened view order: weights then bias.
  std::size_t num_parameters() const noexcept { return weights_.size() + bias_.size(); }
  double& parameter(std::size_t i);
  double parameter(std::size_t i) const;

  bool same_shape(const ModelParams& other) const noexcept {
    return num_classes_ == other.num_classes_ && dim_ == other.dim_;
  }
  bool is_finite() const noexcept;

  // this += scale * other
  void axpy(double scale, const ModelParams& other);
  void scale(double factor);

  // Flattened Euclidean norm.
  double norm() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t num_classes_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// ||a - b|| over the flattened parameters.
double distance(const ModelParams& a, const ModelParams& b);

struct LossAndGrad {
  double loss = 0.0;
  ModelParams grad;
};

// Mean softmax cross-entropy and its exact gradient. kInvalidInput on an
// empty dataset, kDimension on a shape mismatch.
LossAndGrad loss_and_grad(const ModelParams& w, const Dataset& data);
LossAndGrad loss_and_grad(const ModelParams& w, const Dataset& data,
                          std::span<const std::size_t> rows);
double loss(const ModelParams& w, const Dataset& data);

// Fraction of rows whose argmax logit equals the label (ties -> lowest class).
double accuracy(const ModelParams& w, const Dataset& data);

struct TrainConfig {
  double phi = 0.05;                 // learning rate
  std::size_t local_steps = 1;       // M
  std::size_t rounds = 20;           // T
  std::size_t batch_size = 0;        // 0 = full batch
  std::uint64_t batch_seed = 0;

  void validate() const;
  bool full_batch() const noexcept { return batch_size == 0; }
};

// M sequential gradient steps from w. With mini-batches, `rng` picks the
// batch rows and must be provided. kNumericalFailure when an iterate stops
// being finite.
ModelParams local_update(const ModelParams& w, const Dataset& data, const TrainConfig& cfg,
                         Rng* rng = nullptr);

// sum |D_s| w_s / sum |D_s|
ModelParams aggregate(std::span<const ModelParams> models, std::span<const double> sizes);

// sum |D_s| F_s(w_s) / |D|, sizes taken from the datasets.
double global_loss(std::span<const ModelParams> models, std::span<const Dataset> datasets);
double global_loss(const ModelParams& w, std::span<const Dataset> datasets);

struct RoundMetrics {
  std::size_t round = 0;
  double global_loss = 0.0;     // sum |D_s| F_s(w_s) / |D| at the local models
  double aggregate_loss = 0.0;  // F at the aggregated model over all server data
  double accuracy = 0.0;        // aggregated model on the evaluation set
  std::vector<double> per_server_loss;
  double wall_clock = 0.0;      // seconds; never serialized
};

struct FlResult {
  std::vector<RoundMetrics> metrics;
  ModelParams model;
};

// T rounds of local_update on every server from the current global model,
// aggregation weighted by dataset size, and evaluation.
FlResult run_fl(std::span<const Dataset> server_datasets, const TrainConfig& cfg,
                const Dataset& eval_set, std::optional<ModelParams> init = std::nullopt);

// Lock-step Non-IID (w) and IID (v) trainings from a shared initialization.
struct PairedRun {
  TrainConfig config;
  std::vector<double> sizes;          // |D_s|, identical on both sides
  std::vector<ModelParams> w;         // w[0] = init, w[t] after round t
  std::vector<ModelParams> v;
  std::vector<double> distance;       // distance[t] = ||w[t] - v[t]||
};

// kInvalidComparison unless both sides have the same server count and the
// same dataset size per server.
PairedRun run_paired(std::span<const Dataset> noniid, std::span<const Dataset> iid,
                     const TrainConfig& cfg, std::optional<ModelParams> init = std::nullopt);

}  // namespace flocoff
