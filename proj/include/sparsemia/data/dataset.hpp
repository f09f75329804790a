// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sparsemia::data {

struct ImageShape {
  Index channels = 0;
  Index height = 0;
  Index width = 0;

  [[nodiscard]] Index size() const noexcept { return channels * height * width; }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

/// Per-channel statistics. Non-image data treats every feature as a channel.
struct Normalization {
  std::vector<double> mean;
  std::vector<double> stddev;
  bool applied = false;
};

/// Samples stored column-wise: inputs is feature_size × n. Image samples are
/// laid out channel-major (c, y, x).
struct LabeledDataset {
  Matrix inputs;
  std::vector<int> labels;
  int classes = 0;
  std::optional<ImageShape> image;
  Normalization normalization;

  [[nodiscard]] Index size() const noexcept { return inputs.cols(); }
  [[nodiscard]] Index feature_size() const noexcept { return inputs.rows(); }
  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

/// Computes per-channel mean/std over the whole set and standardizes it.
/// Throws std::logic_error if the data was already normalized.
void normalize(LabeledDataset& dataset);

/// Standardizes with externally supplied statistics.
void apply_normalization(LabeledDataset& dataset, const Normalization& stats);

LabeledDataset subset(const LabeledDataset& dataset, std::span<const Index> indices);

}  // namespace sparsemia::data
