#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace flocoff {

using Rng = std::mt19937_64;

// Derives an independent generator for a labeled sub-stream of a run seed,
// so modules never perturb each other's draws.
//
//   Rng topo = make_stream(seed, "topology");
//   Rng dev7 = make_stream(seed, "features/device", 7);
Rng make_stream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

}  // namespace flocoff
