#pragma once

#include <vector>

#include "flocoff/distributions.hpp"
#include "flocoff/rng.hpp"

namespace flocoff::testing {

// Three clients of 1000 samples over 10 classes: one IID, one mildly
// skewed towards classes 0 and 1, one holding a single class. The global
// reference is a separate balanced draw from the same feature model.
struct CraftedInstance {
  std::vector<LabelDistribution> histograms;
  std::vector<Dataset> clients;
  Dataset global;
};

inline CraftedInstance crafted_three_clients(std::uint64_t seed) {
  const auto features = FeatureModel::axis_aligned(10, 16, 3.0, 1.0);
  CraftedInstance out;
  out.histograms = {
      LabelDistribution::uniform(10, 1000),
      LabelDistribution({200, 200, 75, 75, 75, 75, 75, 75, 75, 75}),
      LabelDistribution({1000, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
  };
  for (std::size_t i = 0; i < out.histograms.size(); ++i) {
    Rng rng = make_stream(seed, "crafted/client", i);
    out.clients.push_back(materialize(out.histograms[i], features, rng));
  }
  Rng rng = make_stream(seed, "crafted/global");
  out.global = materialize(LabelDistribution::uniform(10, 3000), features, rng);
  return out;
}

}  // namespace flocoff::testing
