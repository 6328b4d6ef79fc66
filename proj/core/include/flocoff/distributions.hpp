#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "flocoff/rng.hpp"

namespace flocoff {

// Per-class sample histogram. Used for device data D_u, server data D_s,
// the global target D and complements.
class LabelDistribution {
 public:
  explicit LabelDistribution(std::vector<std::int64_t> counts);

  static LabelDistribution zeros(std::size_t num_classes);
  // total samples spread evenly; the remainder goes to the lowest classes.
  static LabelDistribution uniform(std::size_t num_classes, std::int64_t total);

  std::size_t num_classes() const noexcept { return counts_.size(); }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t operator[](std::size_t c) const { return counts_[c]; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }

  LabelDistribution& operator+=(const LabelDistribution& other);
  friend LabelDistribution operator+(LabelDistribution a, const LabelDistribution& b) {
    a += b;
    return a;
  }

  friend bool operator==(const LabelDistribution& a, const LabelDistribution& b) {
    return a.counts_ == b.counts_;
  }

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

class ProbabilityVector {
 public:
  // Entries must be non-negative and sum to 1 within 1e-9.
  explicit ProbabilityVector(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t c) const { return probs_[c]; }
  std::span<const double> probs() const noexcept { return probs_; }

 private:
  std::vector<double> probs_;
};

struct DirichletProfile {
  std::vector<double> alpha;
  std::int64_t samples_per_client = 180;
};

// Class counts drawn from N(high_mean, high_std) for the high-probability
// group and N(low_mean, low_std) for the rest. Classes are split into
// contiguous groups of group_size; the high classes are the first
// num_high_classes of randomly chosen groups.
struct GroupedProfile {
  double high_mean = 50.0;
  double high_std = 20.0;
  double low_mean = 10.0;
  double low_std = 2.0;
  std::size_t num_high_classes = 2;
  std::size_t group_size = 2;
  bool redraw_per_client = true;
};

struct NonIidProfile {
  std::variant<DirichletProfile, GroupedProfile> kind = GroupedProfile{};

  // Throws kInvalidParameter when the profile is unusable with num_classes.
  void validate(std::size_t num_classes) const;

  static NonIidProfile light();
  static NonIidProfile heavy();
  // Every class drawn from N(mean, std).
  static NonIidProfile balanced(double mean, double std);
  static NonIidProfile dirichlet(std::size_t num_classes, double alpha,
                                 std::int64_t samples_per_client = 180);
};

// Errors with kInvalidParameter on any alpha <= 0.
ProbabilityVector sample_dirichlet(std::span<const double> alpha, Rng& rng);

std::vector<LabelDistribution> generate_clients(const NonIidProfile& profile,
                                                std::size_t num_classes,
                                                std::size_t num_clients, Rng& rng);

inline constexpr double kDefaultSmoothing = 1e-6;

// probs[c] = (counts[c] + epsilon) / (total + C * epsilon). An all-zero
// histogram with epsilon == 0 is mapped to uniform.
ProbabilityVector normalize(const LabelDistribution& dist,
                            double epsilon = kDefaultSmoothing);

// Read-only view of one labeled row of a Dataset.
struct Sample {
  std::span<const double> features;
  std::size_t label = 0;
};

// Row-major feature matrix plus labels.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t num_classes, std::size_t dim);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  Sample operator[](std::size_t i) const {
    return {std::span<const double>(features_).subspan(i * dim_, dim_), labels_[i]};
  }
  std::span<const double> features() const noexcept { return features_; }
  std::span<const std::size_t> labels() const noexcept { return labels_; }

  void push_back(std::span<const double> features, std::size_t label);
  void append(const Dataset& other);
  void reserve(std::size_t n);

  LabelDistribution label_distribution() const;
  // Rows in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t num_classes_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> features_;
  std::vector<std::size_t> labels_;
};

// Per-class isotropic Gaussian feature generator.
struct FeatureModel {
  std::vector<std::vector<double>> class_means;
  double std = 1.0;

  std::size_t num_classes() const noexcept { return class_means.size(); }
  std::size_t dim() const noexcept {
    return class_means.empty() ? 0 : class_means.front().size();
  }

  // Class c centered at radius * e_c (requires num_classes <= dim), so any
  // two means are radius * sqrt(2) apart.
  static FeatureModel axis_aligned(std::size_t num_classes, std::size_t dim,
                                   double radius, double std);
};

// Exactly counts[c] samples of each class c, grouped by class in ascending
// order.
Dataset materialize(const LabelDistribution& dist, const FeatureModel& model, Rng& rng);

}  // namespace flocoff
