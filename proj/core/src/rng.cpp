#include "flocoff/rng.hpp"

namespace flocoff {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  // FNV-1a over the label, then mixed with the seed and index.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed ^ h) + index);
}

Rng make_stream(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(mix_seed(seed, label, index)),
                    static_cast<std::uint32_t>(mix_seed(seed, label, index) >> 32),
                    static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

}  // namespace flocoff
