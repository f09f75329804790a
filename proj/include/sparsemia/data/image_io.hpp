// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/dataset.hpp"

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace sparsemia::data {

enum class DatasetErrorKind { io, corrupt_header, truncated, label_out_of_range };

class DatasetError : public std::runtime_error {
 public:
  DatasetError(DatasetErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] DatasetErrorKind kind() const noexcept { return kind_; }

 private:
  DatasetErrorKind kind_;
};

const char* to_string(DatasetErrorKind kind);

// Image container, integers little-endian:
//   "SPDS"  u32 version (=1)  u32 count  u32 channels  u32 height  u32 width
//   u32 classes
//   count × { u8 label, channels·height·width × u8 pixel (channel-major) }
// Pixels load as byte / 255.

/// Reads an image container; normalizes per channel unless `normalize` is false.
/// A file that ends inside the 28-byte header is reported as corrupt_header;
/// one that ends inside the records as truncated.
LabeledDataset load_image_dataset(const std::filesystem::path& path, bool normalize = true);

/// Writes raw (un-normalized) images with values in [0, 1], quantized to bytes.
void write_image_dataset(const std::filesystem::path& path, const LabeledDataset& dataset);

/// Standard CIFAR-10 binary batches (1 label byte + 3072 pixel bytes per image).
LabeledDataset load_cifar10(const std::vector<std::filesystem::path>& batches,
                            bool normalize = true);

}  // namespace sparsemia::data
