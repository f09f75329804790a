// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/data/augment.hpp"

#include <stdexcept>

namespace sparsemia::data {

Vector flip_horizontal(const Vector& image, const ImageShape& shape) {
  Vector out(image.size());
  for (Index c = 0; c < shape.channels; ++c) {
    for (Index y = 0; y < shape.height; ++y) {
      const Index row = (c * shape.height + y) * shape.width;
      for (Index x = 0; x < shape.width; ++x) {
        out[row + x] = image[row + shape.width - 1 - x];
      }
    }
  }
  return out;
}

Vector crop_padded(const Vector& image, const ImageShape& shape, Index pad, Index dy, Index dx) {
  if (dy < 0 || dx < 0 || dy > 2 * pad || dx > 2 * pad) {
    throw std::out_of_range("crop_padded: offset outside the padded image");
  }
  Vector out = Vector::Zero(image.size());
  for (Index c = 0; c < shape.channels; ++c) {
    for (Index y = 0; y < shape.height; ++y) {
      const Index sy = y + dy - pad;
      if (sy < 0 || sy >= shape.height) continue;
      for (Index x = 0; x < shape.width; ++x) {
        const Index sx = x + dx - pad;
        if (sx < 0 || sx >= shape.width) continue;
        out[(c * shape.height + y) * shape.width + x] =
            image[(c * shape.height + sy) * shape.width + sx];
      }
    }
  }
  return out;
}

AugmentResult augment(const Matrix& batch, const std::optional<ImageShape>& shape, Rng& rng) {
  if (!shape || shape->size() != batch.rows()) return {batch, true};
  std::bernoulli_distribution flip(0.5);
  std::uniform_int_distribution<Index> offset(0, 2 * kCropPadding);
  AugmentResult result{Matrix(batch.rows(), batch.cols()), false};
  for (Index i = 0; i < batch.cols(); ++i) {
    Vector image = batch.col(i);
    if (flip(rng)) image = flip_horizontal(image, *shape);
    const Index dy = offset(rng);
    const Index dx = offset(rng);
    result.batch.col(i) = crop_padded(image, *shape, kCropPadding, dy, dx);
  }
  return result;
}

}  // namespace sparsemia::data
