#include "flocoff/federated.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "flocoff/error.hpp"

namespace flocoff {

ModelParams::ModelParams(std::size_t num_classes, std::size_t dim)
    : num_classes_(num_classes),
      dim_(dim),
      weights_(num_classes * dim, 0.0),
      bias_(num_classes, 0.0) {}

ModelParams ModelParams::gaussian(std::size_t num_classes, std::size_t dim, double std, Rng& rng) {
  ModelParams m(num_classes, dim);
  std::normal_distribution<double> normal(0.0, std);
  for (double& x : m.weights_) x = normal(rng);
  for (double& x : m.bias_) x = normal(rng);
  return m;
}

double& ModelParams::parameter(std::size_t i) {
  return i < weights_.size() ? weights_[i] : bias_.at(i - weights_.size());
}

double ModelParams::parameter(std::size_t i) const {
  return i < weights_.size() ? weights_[i] : bias_.at(i - weights_.size());
}

bool ModelParams::is_finite() const noexcept {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(weights_.begin(), weights_.end(), finite) &&
         std::all_of(bias_.begin(), bias_.end(), finite);
}

void ModelParams::axpy(double scale, const ModelParams& other) {
  if (!same_shape(other)) throw Error(ErrorKind::kDimension, "model shape mismatch");
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += scale * other.weights_[i];
  for (std::size_t i = 0; i < bias_.size(); ++i) bias_[i] += scale * other.bias_[i];
}

void ModelParams::scale(double factor) {
  for (double& x : weights_) x *= factor;
  for (double& x : bias_) x *= factor;
}

double ModelParams::norm() const {
  double sum = 0.0;
  for (double x : weights_) sum += x * x;
  for (double x : bias_) sum += x * x;
  return std::sqrt(sum);
}

double distance(const ModelParams& a, const ModelParams& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::kDimension, "model shape mismatch");
  double sum = 0.0;
  const auto wa = a.weights(), wb = b.weights();
  for (std::size_t i = 0; i < wa.size(); ++i) sum += (wa[i] - wb[i]) * (wa[i] - wb[i]);
  const auto ba = a.bias(), bb = b.bias();
  for (std::size_t i = 0; i < ba.size(); ++i) sum += (ba[i] - bb[i]) * (ba[i] - bb[i]);
  return std::sqrt(sum);
}

namespace {

void check_shape(const ModelParams& w, const Dataset& data) {
  if (data.empty()) throw Error(ErrorKind::kInvalidInput, "empty dataset");
  if (w.num_classes() != data.num_classes() || w.dim() != data.dim()) {
    throw Error(ErrorKind::kDimension, "model shape does not match dataset");
  }
}

// Logits for one row into `z`, then in-place softmax; returns log-sum-exp.
double softmax_row(const ModelParams& w, std::span<const double> x, std::vector<double>& z) {
  const std::size_t c = w.num_classes();
  const auto b = w.bias();
  for (std::size_t k = 0; k < c; ++k) {
    double acc = b[k];
    for (std::size_t j = 0; j < x.size(); ++j) acc += w.weight(k, j) * x[j];
    z[k] = acc;
  }
  const double zmax = *std::max_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(c));
  double sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    z[k] = std::exp(z[k] - zmax);
    sum += z[k];
  }
  for (std::size_t k = 0; k < c; ++k) z[k] /= sum;
  return zmax + std::log(sum);
}

template <typename RowRange>
LossAndGrad loss_and_grad_rows(const ModelParams& w, const Dataset& data, const RowRange& rows,
                               std::size_t count) {
  LossAndGrad out{0.0, ModelParams(w.num_classes(), w.dim())};
  std::vector<double> p(w.num_classes());
  auto gw = out.grad.weights();
  auto gb = out.grad.bias();
  const std::size_t dim = w.dim();
  for (std::size_t i : rows) {
    const auto s = data[i];
    const double lse = softmax_row(w, s.features, p);
    double z_label = w.bias()[s.label];
    for (std::size_t j = 0; j < dim; ++j) z_label += w.weight(s.label, j) * s.features[j];
    out.loss += lse - z_label;
    for (std::size_t k = 0; k < w.num_classes(); ++k) {
      const double r = p[k] - (k == s.label ? 1.0 : 0.0);
      gb[k] += r;
      double* g = gw.data() + k * dim;
      for (std::size_t j = 0; j < dim; ++j) g[j] += r * s.features[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  out.loss *= inv;
  out.grad.scale(inv);
  return out;
}

struct IotaRange {
  std::size_t n;
  struct It {
    std::size_t i;
    std::size_t operator*() const { return i; }
    It& operator++() { ++i; return *this; }
    bool operator!=(const It& o) const { return i != o.i; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
};

}  // namespace

LossAndGrad loss_and_grad(const ModelParams& w, const Dataset& data) {
  check_shape(w, data);
  return loss_and_grad_rows(w, data, IotaRange{data.size()}, data.size());
}

LossAndGrad loss_and_grad(const ModelParams& w, const Dataset& data,
                          std::span<const std::size_t> rows) {
  check_shape(w, data);
  if (rows.empty()) throw Error(ErrorKind::kInvalidInput, "empty batch");
  return loss_and_grad_rows(w, data, rows, rows.size());
}

double loss(const ModelParams& w, const Dataset& data) { return loss_and_grad(w, data).loss; }

double accuracy(const ModelParams& w, const Dataset& data) {
  check_shape(w, data);
  std::vector<double> p(w.num_classes());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto s = data[i];
    softmax_row(w, s.features, p);
    const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    if (best == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

void TrainConfig::validate() const {
  if (!(phi >= 0.0) || !std::isfinite(phi)) {
    throw Error(ErrorKind::kInvalidParameter, "learning rate must be finite and >= 0");
  }
  if (local_steps == 0) throw Error(ErrorKind::kInvalidParameter, "local_steps must be >= 1");
}

ModelParams local_update(const ModelParams& w, const Dataset& data, const TrainConfig& cfg,
                         Rng* rng) {
  check_shape(w, data);
  cfg.validate();
  if (!cfg.full_batch() && rng == nullptr) {
    throw Error(ErrorKind::kInvalidParameter, "mini-batch training needs an rng");
  }
  ModelParams current = w;
  std::vector<std::size_t> order;
  if (!cfg.full_batch()) {
    order.resize(data.size());
    std::iota(order.begin(), order.end(), 0);
  }
  for (std::size_t step = 0; step < cfg.local_steps; ++step) {
    LossAndGrad lg;
    if (cfg.full_batch()) {
      lg = loss_and_grad(current, data);
    } else {
      std::shuffle(order.begin(), order.end(), *rng);
      const std::size_t b = std::min(cfg.batch_size, order.size());
      lg = loss_and_grad(current, data, std::span<const std::size_t>(order).first(b));
    }
    current.axpy(-cfg.phi, lg.grad);
    if (!current.is_finite()) {
      throw Error(ErrorKind::kNumericalFailure,
                  "local update diverged at step " + std::to_string(step + 1));
    }
  }
  return current;
}

ModelParams aggregate(std::span<const ModelParams> models, std::span<const double> sizes) {
  if (models.empty()) throw Error(ErrorKind::kInvalidInput, "no models to aggregate");
  if (models.size() != sizes.size()) throw Error(ErrorKind::kDimension, "models/sizes length mismatch");
  double total = 0.0;
  for (double s : sizes) {
    if (s < 0.0) throw Error(ErrorKind::kInvalidInput, "negative dataset size");
    total += s;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kInvalidInput, "aggregate weights sum to zero");
  ModelParams out(models.front().num_classes(), models.front().dim());
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!models[i].same_shape(out)) throw Error(ErrorKind::kDimension, "model shape mismatch");
  }
  // Summed in a canonical order so permuted inputs give bit-identical output.
  std::vector<std::size_t> order(models.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sizes[a] != sizes[b]) return sizes[a] < sizes[b];
    const auto wa = models[a].weights(), wb = models[b].weights();
    if (!std::equal(wa.begin(), wa.end(), wb.begin(), wb.end())) {
      return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end());
    }
    const auto ba = models[a].bias(), bb = models[b].bias();
    return std::lexicographical_compare(ba.begin(), ba.end(), bb.begin(), bb.end());
  });
  for (std::size_t i : order) out.axpy(sizes[i] / total, models[i]);
  return out;
}

namespace {

double total_size(std::span<const Dataset> datasets) {
  double total = 0.0;
  for (const auto& d : datasets) total += static_cast<double>(d.size());
  if (!(total > 0.0)) throw Error(ErrorKind::kInvalidInput, "datasets are all empty");
  return total;
}

}  // namespace

double global_loss(std::span<const ModelParams> models, std::span<const Dataset> datasets) {
  if (models.size() != datasets.size()) {
    throw Error(ErrorKind::kDimension, "models/datasets length mismatch");
  }
  const double total = total_size(datasets);
  double sum = 0.0;
  for (std::size_t s = 0; s < models.size(); ++s) {
    if (datasets[s].empty()) continue;
    sum += static_cast<double>(datasets[s].size()) * loss(models[s], datasets[s]);
  }
  return sum / total;
}

double global_loss(const ModelParams& w, std::span<const Dataset> datasets) {
  const double total = total_size(datasets);
  double sum = 0.0;
  for (const auto& d : datasets) {
    if (d.empty()) continue;
    sum += static_cast<double>(d.size()) * loss(w, d);
  }
  return sum / total;
}

namespace {

ModelParams initial_model(std::span<const Dataset> datasets, const std::optional<ModelParams>& init) {
  if (datasets.empty()) throw Error(ErrorKind::kInvalidInput, "no server datasets");
  for (const auto& d : datasets) {
    if (d.empty()) throw Error(ErrorKind::kInvalidInput, "empty server dataset");
  }
  ModelParams w = init ? *init : ModelParams::zeros(datasets.front().num_classes(),
                                                    datasets.front().dim());
  for (const auto& d : datasets) check_shape(w, d);
  return w;
}

std::vector<double> sizes_of(std::span<const Dataset> datasets) {
  std::vector<double> sizes;
  sizes.reserve(datasets.size());
  for (const auto& d : datasets) sizes.push_back(static_cast<double>(d.size()));
  return sizes;
}

}  // namespace

FlResult run_fl(std::span<const Dataset> server_datasets, const TrainConfig& cfg,
                const Dataset& eval_set, std::optional<ModelParams> init) {
  cfg.validate();
  FlResult result;
  result.model = initial_model(server_datasets, init);
  const auto sizes = sizes_of(server_datasets);
  std::vector<ModelParams> local(server_datasets.size());

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t s = 0; s < server_datasets.size(); ++s) {
      if (cfg.full_batch()) {
        local[s] = local_update(result.model, server_datasets[s], cfg);
      } else {
        Rng rng = make_stream(cfg.batch_seed, "batch", t * server_datasets.size() + s);
        local[s] = local_update(result.model, server_datasets[s], cfg, &rng);
      }
    }
    result.model = aggregate(local, sizes);

    RoundMetrics m;
    m.round = t;
    m.per_server_loss.reserve(local.size());
    for (std::size_t s = 0; s < local.size(); ++s) {
      m.per_server_loss.push_back(loss(local[s], server_datasets[s]));
    }
    m.global_loss = global_loss(local, server_datasets);
    m.aggregate_loss = global_loss(result.model, server_datasets);
    m.accuracy = eval_set.empty() ? 0.0 : accuracy(result.model, eval_set);
    m.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.metrics.push_back(std::move(m));
  }
  return result;
}

PairedRun run_paired(std::span<const Dataset> noniid, std::span<const Dataset> iid,
                     const TrainConfig& cfg, std::optional<ModelParams> init) {
  cfg.validate();
  if (noniid.size() != iid.size()) {
    throw Error(ErrorKind::kInvalidComparison, "paired runs need the same server count");
  }
  for (std::size_t s = 0; s < noniid.size(); ++s) {
    if (noniid[s].size() != iid[s].size()) {
      throw Error(ErrorKind::kInvalidComparison,
                  "server " + std::to_string(s) + " has different dataset sizes in the paired runs");
    }
  }
  if (!cfg.full_batch()) {
    throw Error(ErrorKind::kInvalidParameter, "paired runs are full-batch only");
  }
  PairedRun run;
  run.config = cfg;
  run.sizes = sizes_of(noniid);
  ModelParams w = initial_model(noniid, init);
  ModelParams v = w;
  initial_model(iid, w);
  run.w.push_back(w);
  run.v.push_back(v);
  run.distance.push_back(0.0);

  std::vector<ModelParams> wl(noniid.size()), vl(iid.size());
  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    for (std::size_t s = 0; s < noniid.size(); ++s) {
      wl[s] = local_update(w, noniid[s], cfg);
      vl[s] = local_update(v, iid[s], cfg);
    }
    w = aggregate(wl, run.sizes);
    v = aggregate(vl, run.sizes);
    run.w.push_back(w);
    run.v.push_back(v);
    run.distance.push_back(distance(w, v));
  }
  return run;
}

}  // namespace flocoff
