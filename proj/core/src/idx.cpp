#include "flocoff/idx.hpp"

#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "flocoff/error.hpp"

namespace flocoff {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw Error(ErrorKind::kInvalidInput, "idx: truncated header");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels,
                  std::size_t num_classes) {
  if (read_be32(images, 0) != kIdxImagesMagic) throw Error(ErrorKind::kInvalidInput, "idx: bad image magic");
  if (read_be32(labels, 0) != kIdxLabelsMagic) throw Error(ErrorKind::kInvalidInput, "idx: bad label magic");
  const std::size_t n = read_be32(images, 4);
  const std::size_t rows = read_be32(images, 8);
  const std::size_t cols = read_be32(images, 12);
  if (read_be32(labels, 4) != n) throw Error(ErrorKind::kInvalidInput, "idx: image/label counts differ");
  const std::size_t dim = rows * cols;
  if (images.size() != 16 + n * dim) throw Error(ErrorKind::kInvalidInput, "idx: image payload size");
  if (labels.size() != 8 + n) throw Error(ErrorKind::kInvalidInput, "idx: label payload size");

  Dataset out(num_classes, dim);
  out.reserve(n);
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) row[j] = images[16 + i * dim + j] / 255.0;
    const std::size_t label = labels[8 + i];
    if (label >= num_classes) {
      throw Error(ErrorKind::kInvalidInput, "idx: label " + std::to_string(label) + " out of range");
    }
    out.push_back(row, label);
  }
  return out;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t num_classes) {
  const auto img = read_all(images);
  const auto lab = read_all(labels);
  return parse_idx(img, lab, num_classes);
}

}  // namespace flocoff
