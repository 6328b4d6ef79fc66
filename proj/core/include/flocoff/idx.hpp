#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

#include "flocoff/distributions.hpp"

namespace flocoff {

inline constexpr std::uint32_t kIdxImagesMagic = 2051;
inline constexpr std::uint32_t kIdxLabelsMagic = 2049;

// MNIST-style IDX pair: unsigned-byte images (magic 2051, dims n x rows x
// cols) and labels (magic 2049, dim n), big-endian headers. Pixels are
// scaled to [0, 1]. kInvalidInput on malformed data or mismatched counts.
Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels,
                  std::size_t num_classes = 10);

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t num_classes = 10);

}  // namespace flocoff
