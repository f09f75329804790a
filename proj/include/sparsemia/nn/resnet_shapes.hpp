// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/types.hpp"

#include <vector>

namespace sparsemia::nn {

/// Shape-only description of a CIFAR ResNet; nothing here is trainable.
struct ConvShape {
  Index in_channels = 0;
  Index out_channels = 0;
  Index kernel = 3;
  /// 0 for the stem, 1..3 for the residual stages.
  int stage = 0;
  /// 1×1 projection on a downsampling shortcut.
  bool projection = false;

  [[nodiscard]] Index weight_count() const noexcept {
    return in_channels * out_channels * kernel * kernel;
  }
};

struct ResNetShape {
  std::vector<ConvShape> convs;
  /// Channel count of every batchnorm (scale and shift each).
  std::vector<Index> batchnorms;
  Index fc_inputs = 0;
  Index classes = 0;

  /// Conv weights (no conv bias) + 2 per batchnorm channel + fc weights and
  /// bias.
  [[nodiscard]] Index param_count() const noexcept;
};

/// ResNet-20 for 32×32 inputs: 16-channel stem, three stages of three basic
/// blocks (16, 32, 64 channels), 1×1 conv + batchnorm projection shortcuts
/// where the shape changes, global pooling, linear classifier.
ResNetShape resnet20_shape(Index classes = 10);

/// Parameter percentage of ResNet-20 after replacing the 3×3 convolution
/// weight matrices (out × in·3·3) of the last `segments` stages with their
/// minimal-parameter butterfly chains of `depth` factors.
double resnet20_butterfly_fraction(int segments, int depth);

}  // namespace sparsemia::nn
