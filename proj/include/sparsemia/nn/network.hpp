// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/layers.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace sparsemia::nn {

/// Sequential stack of layers. Copies are deep.
class Network {
 public:
  Network() = default;
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  /// Appends a layer; its input size must match the current output size.
  void push_back(std::unique_ptr<Layer> layer);

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    push_back(std::move(layer));
    return ref;
  }

  [[nodiscard]] std::size_t size() const noexcept { return layers_.size(); }
  [[nodiscard]] bool empty() const noexcept { return layers_.empty(); }
  [[nodiscard]] Layer& layer(std::size_t i) { return *layers_[i]; }
  [[nodiscard]] const Layer& layer(std::size_t i) const { return *layers_[i]; }
  [[nodiscard]] Index input_size() const;
  [[nodiscard]] Index output_size() const;

  /// Logits (classes × batch) for a feature_size × batch input.
  Matrix forward(const Matrix& batch, Mode mode);
  /// Back-propagates d(loss)/d(logits); parameter gradients accumulate.
  Matrix backward(const Matrix& grad_logits);
  /// Evaluation-mode logits without touching any cached state.
  [[nodiscard]] Matrix infer(const Matrix& batch) const;

  void initialize(Rng& rng);
  void zero_grad();
  /// Re-applies every mask, forcing pruned entries to exactly zero.
  void apply_masks();

  /// Every parameter in layer order, buffers included.
  [[nodiscard]] std::vector<Parameter*> parameters();
  [[nodiscard]] std::vector<const Parameter*> parameters() const;
  [[nodiscard]] std::vector<Parameter*> trainable_parameters();

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// Values of every parameter (buffers included), in parameters() order.
using ParameterSnapshot = std::vector<Vector>;

ParameterSnapshot snapshot(const Network& network);
/// Throws std::invalid_argument when shapes differ.
void restore(Network& network, const ParameterSnapshot& values);

struct ParamCount {
  Index total = 0;
  /// Entries kept by masks (all entries of unmasked parameters).
  Index nonzero = 0;
};

/// Counts trainable parameters: weights, biases, batchnorm scale and shift,
/// and butterfly support values. Running statistics are not counted.
ParamCount count_params(const Network& network);

}  // namespace sparsemia::nn
