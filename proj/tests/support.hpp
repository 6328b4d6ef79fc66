#pragma once

#include <optional>
#include <random>

#include "doctest.h"
#include "flocoff/distributions.hpp"
#include "flocoff/error.hpp"
#include "flocoff/rng.hpp"

namespace flocoff::testing {

// Kind of the flocoff::Error thrown by f, or nullopt when f returns.
template <typename F>
std::optional<ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

#define CHECK_ERROR_KIND(expr, kind) \
  CHECK(::flocoff::testing::thrown_kind([&] { (void)(expr); }) == std::optional(kind))

inline Dataset random_dataset(std::size_t classes, std::size_t dim, std::size_t n, Rng& rng,
                              double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  std::uniform_int_distribution<std::size_t> label(0, classes - 1);
  Dataset d(classes, dim);
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = gauss(rng);
    d.push_back(x, label(rng));
  }
  return d;
}

}  // namespace flocoff::testing
