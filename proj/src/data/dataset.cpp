// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/data/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsemia::data {

namespace {

// Channel count and per-channel spatial extent.
std::pair<Index, Index> channel_layout(const LabeledDataset& d) {
  if (d.image) return {d.image->channels, d.image->height * d.image->width};
  return {d.feature_size(), 1};
}

}  // namespace

void LabeledDataset::validate() const {
  if (static_cast<Index>(labels.size()) != inputs.cols()) {
    throw std::invalid_argument("dataset: label count differs from sample count");
  }
  if (classes < 1) throw std::invalid_argument("dataset: class count must be positive");
  for (int y : labels) {
    if (y < 0 || y >= classes) throw std::invalid_argument("dataset: label out of range");
  }
  if (image && image->size() != inputs.rows()) {
    throw std::invalid_argument("dataset: image shape does not match feature size");
  }
}

void normalize(LabeledDataset& dataset) {
  if (dataset.normalization.applied) {
    throw std::logic_error("dataset is already normalized");
  }
  const auto [channels, spatial] = channel_layout(dataset);
  Normalization stats;
  stats.mean.resize(static_cast<std::size_t>(channels));
  stats.stddev.resize(static_cast<std::size_t>(channels));
  const double count = static_cast<double>(spatial * dataset.size());
  for (Index c = 0; c < channels; ++c) {
    const auto block = dataset.inputs.middleRows(c * spatial, spatial);
    const double mean = count > 0 ? block.sum() / count : 0.0;
    const double var = count > 0 ? (block.array() - mean).square().sum() / count : 0.0;
    stats.mean[static_cast<std::size_t>(c)] = mean;
    // Constant channels are only centred.
    stats.stddev[static_cast<std::size_t>(c)] = var > 0 ? std::sqrt(var) : 1.0;
  }
  apply_normalization(dataset, stats);
}

void apply_normalization(LabeledDataset& dataset, const Normalization& stats) {
  if (dataset.normalization.applied) {
    throw std::logic_error("dataset is already normalized");
  }
  const auto [channels, spatial] = channel_layout(dataset);
  if (static_cast<Index>(stats.mean.size()) != channels ||
      static_cast<Index>(stats.stddev.size()) != channels) {
    throw std::invalid_argument("normalization: channel count mismatch");
  }
  for (Index c = 0; c < channels; ++c) {
    auto block = dataset.inputs.middleRows(c * spatial, spatial);
    block.array() = (block.array() - stats.mean[static_cast<std::size_t>(c)]) /
                    stats.stddev[static_cast<std::size_t>(c)];
  }
  dataset.normalization = stats;
  dataset.normalization.applied = true;
}

LabeledDataset subset(const LabeledDataset& dataset, std::span<const Index> indices) {
  LabeledDataset out;
  out.classes = dataset.classes;
  out.image = dataset.image;
  out.normalization = dataset.normalization;
  out.inputs.resize(dataset.feature_size(), static_cast<Index>(indices.size()));
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index i = indices[k];
    if (i < 0 || i >= dataset.size()) throw std::out_of_range("subset: index out of range");
    out.inputs.col(static_cast<Index>(k)) = dataset.inputs.col(i);
    out.labels.push_back(dataset.labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace sparsemia::data
