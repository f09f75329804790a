// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/dataset.hpp"

#include <optional>

namespace sparsemia::data {

inline constexpr Index kCropPadding = 4;

/// Mirrors every channel left-right.
Vector flip_horizontal(const Vector& image, const ImageShape& shape);

/// Zero-pads by `pad` on each side and cuts a window of the original size whose
/// top-left corner sits at (dy, dx) in the padded image. (pad, pad) returns the
/// input unchanged.
Vector crop_padded(const Vector& image, const ImageShape& shape, Index pad, Index dy, Index dx);

struct AugmentResult {
  Matrix batch;
  /// Set when the batch was not image-shaped and was returned unchanged.
  bool passthrough = false;
};

/// Random horizontal flip (probability 1/2) followed by a random crop after
/// kCropPadding-pixel zero padding, drawn independently per image.
AugmentResult augment(const Matrix& batch, const std::optional<ImageShape>& shape, Rng& rng);

}  // namespace sparsemia::data
