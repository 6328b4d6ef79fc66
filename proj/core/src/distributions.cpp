#include "flocoff/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flocoff/error.hpp"

namespace flocoff {

LabelDistribution::LabelDistribution(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  if (counts_.size() < 2) {
    throw Error(ErrorKind::kInvalidParameter, "label distribution needs at least 2 classes");
  }
  for (auto c : counts_) {
    if (c < 0) throw Error(ErrorKind::kInvalidParameter, "negative class count");
    total_ += c;
  }
}

LabelDistribution LabelDistribution::zeros(std::size_t num_classes) {
  return LabelDistribution(std::vector<std::int64_t>(num_classes, 0));
}

LabelDistribution LabelDistribution::uniform(std::size_t num_classes, std::int64_t total) {
  if (num_classes == 0 || total < 0) {
    throw Error(ErrorKind::kInvalidParameter, "uniform distribution needs classes and total >= 0");
  }
  const auto c = static_cast<std::int64_t>(num_classes);
  std::vector<std::int64_t> counts(num_classes, total / c);
  for (std::int64_t i = 0; i < total % c; ++i) ++counts[static_cast<std::size_t>(i)];
  return LabelDistribution(std::move(counts));
}

LabelDistribution& LabelDistribution::operator+=(const LabelDistribution& other) {
  if (other.num_classes() != num_classes()) {
    throw Error(ErrorKind::kDimension, "class count mismatch in merge");
  }
  for (std::size_t c = 0; c < counts_.size(); ++c) counts_[c] += other.counts_[c];
  total_ += other.total_;
  return *this;
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorKind::kInvalidParameter, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidParameter,
                "probabilities sum to " + std::to_string(sum) + ", not 1");
  }
}

void NonIidProfile::validate(std::size_t num_classes) const {
  if (num_classes < 2) throw Error(ErrorKind::kInvalidParameter, "need at least 2 classes");
  if (const auto* d = std::get_if<DirichletProfile>(&kind)) {
    if (d->alpha.size() != num_classes) {
      throw Error(ErrorKind::kDimension, "dirichlet alpha length differs from class count");
    }
    for (double a : d->alpha) {
      if (!(a > 0.0)) throw Error(ErrorKind::kInvalidParameter, "dirichlet alpha must be > 0");
    }
    if (d->samples_per_client < 0) {
      throw Error(ErrorKind::kInvalidParameter, "samples_per_client must be >= 0");
    }
    return;
  }
  const auto& g = std::get<GroupedProfile>(kind);
  if (!(g.high_mean > 0.0) || !(g.low_mean > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter, "grouped means must be > 0");
  }
  if (g.high_std < 0.0 || g.low_std < 0.0) {
    throw Error(ErrorKind::kInvalidParameter, "grouped stds must be >= 0");
  }
  if (g.num_high_classes > num_classes) {
    throw Error(ErrorKind::kInvalidParameter, "more high classes than classes");
  }
  if (g.group_size == 0 || num_classes % g.group_size != 0) {
    throw Error(ErrorKind::kInvalidParameter, "group_size must divide the class count");
  }
}

NonIidProfile NonIidProfile::light() { return NonIidProfile{GroupedProfile{}}; }

NonIidProfile NonIidProfile::heavy() {
  GroupedProfile g;
  g.low_mean = 0.5;
  g.low_std = 1.0;
  return NonIidProfile{g};
}

NonIidProfile NonIidProfile::balanced(double mean, double std) {
  GroupedProfile g;
  g.high_mean = mean;
  g.high_std = std;
  g.low_mean = mean;
  g.low_std = std;
  g.num_high_classes = 0;
  return NonIidProfile{g};
}

NonIidProfile NonIidProfile::dirichlet(std::size_t num_classes, double alpha,
                                       std::int64_t samples_per_client) {
  return NonIidProfile{DirichletProfile{std::vector<double>(num_classes, alpha), samples_per_client}};
}

ProbabilityVector sample_dirichlet(std::span<const double> alpha, Rng& rng) {
  if (alpha.empty()) throw Error(ErrorKind::kInvalidParameter, "empty dirichlet alpha");
  std::vector<double> draws(alpha.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0)) throw Error(ErrorKind::kInvalidParameter, "dirichlet alpha must be > 0");
    std::gamma_distribution<double> gamma(alpha[k], 1.0);
    draws[k] = gamma(rng);
    sum += draws[k];
  }
  if (!(sum > 0.0)) {
    // Every gamma draw underflowed (tiny alphas); all mass on one class.
    std::uniform_int_distribution<std::size_t> pick(0, alpha.size() - 1);
    std::fill(draws.begin(), draws.end(), 0.0);
    draws[pick(rng)] = 1.0;
    return ProbabilityVector(std::move(draws));
  }
  for (double& d : draws) d /= sum;
  // Absorb rounding so the vector sums to 1 to the last ulp we can manage.
  const double residual = 1.0 - std::accumulate(draws.begin(), draws.end(), 0.0);
  *std::max_element(draws.begin(), draws.end()) += residual;
  return ProbabilityVector(std::move(draws));
}

namespace {

std::int64_t gaussian_count(double mean, double std, Rng& rng) {
  if (std == 0.0) return std::max<std::int64_t>(0, std::llround(mean));
  std::normal_distribution<double> normal(mean, std);
  return std::max<std::int64_t>(0, std::llround(normal(rng)));
}

std::vector<bool> pick_high_classes(const GroupedProfile& g, std::size_t num_classes, Rng& rng) {
  std::vector<bool> high(num_classes, false);
  if (g.num_high_classes == 0) return high;
  std::vector<std::size_t> groups(num_classes / g.group_size);
  std::iota(groups.begin(), groups.end(), 0);
  // Partial Fisher-Yates: only as many groups as the high classes need.
  const std::size_t needed = (g.num_high_classes + g.group_size - 1) / g.group_size;
  for (std::size_t i = 0; i < needed; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, groups.size() - 1);
    std::swap(groups[i], groups[pick(rng)]);
  }
  std::size_t marked = 0;
  for (std::size_t i = 0; i < needed; ++i) {
    for (std::size_t j = 0; j < g.group_size && marked < g.num_high_classes; ++j, ++marked) {
      high[groups[i] * g.group_size + j] = true;
    }
  }
  return high;
}

std::vector<std::int64_t> multinomial(std::int64_t n, const ProbabilityVector& p, Rng& rng) {
  std::vector<std::int64_t> counts(p.size(), 0);
  double remaining_mass = 1.0;
  std::int64_t remaining = n;
  for (std::size_t k = 0; k + 1 < p.size() && remaining > 0; ++k) {
    const double q = remaining_mass > 0.0 ? std::clamp(p[k] / remaining_mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> binom(remaining, q);
    counts[k] = binom(rng);
    remaining -= counts[k];
    remaining_mass -= p[k];
  }
  counts.back() += remaining;
  return counts;
}

}  // namespace

std::vector<LabelDistribution> generate_clients(const NonIidProfile& profile,
                                                std::size_t num_classes,
                                                std::size_t num_clients, Rng& rng) {
  profile.validate(num_classes);
  if (num_clients == 0) throw Error(ErrorKind::kInvalidParameter, "num_clients must be >= 1");

  std::vector<LabelDistribution> clients;
  clients.reserve(num_clients);

  if (const auto* d = std::get_if<DirichletProfile>(&profile.kind)) {
    for (std::size_t i = 0; i < num_clients; ++i) {
      const auto theta = sample_dirichlet(d->alpha, rng);
      clients.emplace_back(multinomial(d->samples_per_client, theta, rng));
    }
    return clients;
  }

  const auto& g = std::get<GroupedProfile>(profile.kind);
  std::vector<bool> high = pick_high_classes(g, num_classes, rng);
  for (std::size_t i = 0; i < num_clients; ++i) {
    if (g.redraw_per_client && i > 0) high = pick_high_classes(g, num_classes, rng);
    std::vector<std::int64_t> counts(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
      counts[c] = high[c] ? gaussian_count(g.high_mean, g.high_std, rng)
                          : gaussian_count(g.low_mean, g.low_std, rng);
    }
    clients.emplace_back(std::move(counts));
  }
  return clients;
}

ProbabilityVector normalize(const LabelDistribution& dist, double epsilon) {
  if (epsilon < 0.0) throw Error(ErrorKind::kInvalidParameter, "smoothing must be >= 0");
  const std::size_t c = dist.num_classes();
  const double denom = static_cast<double>(dist.total()) + static_cast<double>(c) * epsilon;
  std::vector<double> probs(c);
  if (denom == 0.0) {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(c));
  } else {
    for (std::size_t k = 0; k < c; ++k) {
      probs[k] = (static_cast<double>(dist[k]) + epsilon) / denom;
    }
  }
  return ProbabilityVector(std::move(probs));
}

Dataset::Dataset(std::size_t num_classes, std::size_t dim) : num_classes_(num_classes), dim_(dim) {}

void Dataset::push_back(std::span<const double> features, std::size_t label) {
  if (features.size() != dim_) throw Error(ErrorKind::kDimension, "feature dimension mismatch");
  if (label >= num_classes_) throw Error(ErrorKind::kInvalidInput, "label out of range");
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

void Dataset::append(const Dataset& other) {
  if (other.empty()) return;
  if (empty() && labels_.empty() && dim_ == 0 && num_classes_ == 0) {
    *this = other;
    return;
  }
  if (other.dim_ != dim_ || other.num_classes_ != num_classes_) {
    throw Error(ErrorKind::kDimension, "dataset shape mismatch in append");
  }
  features_.insert(features_.end(), other.features_.begin(), other.features_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

void Dataset::reserve(std::size_t n) {
  features_.reserve(n * dim_);
  labels_.reserve(n);
}

LabelDistribution Dataset::label_distribution() const {
  std::vector<std::int64_t> counts(std::max<std::size_t>(num_classes_, 2), 0);
  for (auto l : labels_) ++counts[l];
  return LabelDistribution(std::move(counts));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(num_classes_, dim_);
  out.reserve(indices.size());
  for (auto i : indices) {
    const auto s = (*this)[i];
    out.push_back(s.features, s.label);
  }
  return out;
}

FeatureModel FeatureModel::axis_aligned(std::size_t num_classes, std::size_t dim, double radius,
                                        double std) {
  if (num_classes > dim) {
    throw Error(ErrorKind::kInvalidParameter, "axis-aligned means need num_classes <= dim");
  }
  if (!(std > 0.0)) throw Error(ErrorKind::kInvalidParameter, "feature std must be > 0");
  FeatureModel model;
  model.std = std;
  model.class_means.assign(num_classes, std::vector<double>(dim, 0.0));
  for (std::size_t c = 0; c < num_classes; ++c) model.class_means[c][c] = radius;
  return model;
}

Dataset materialize(const LabelDistribution& dist, const FeatureModel& model, Rng& rng) {
  if (model.num_classes() != dist.num_classes()) {
    throw Error(ErrorKind::kDimension, "feature model does not cover every class");
  }
  const std::size_t dim = model.dim();
  Dataset out(dist.num_classes(), dim);
  out.reserve(static_cast<std::size_t>(dist.total()));
  std::normal_distribution<double> noise(0.0, model.std);
  std::vector<double> row(dim);
  for (std::size_t c = 0; c < dist.num_classes(); ++c) {
    for (std::int64_t i = 0; i < dist[c]; ++i) {
      for (std::size_t j = 0; j < dim; ++j) row[j] = model.class_means[c][j] + noise(rng);
      out.push_back(row, c);
    }
  }
  return out;
}

}  // namespace flocoff
