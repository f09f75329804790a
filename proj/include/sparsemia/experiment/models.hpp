// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/dataset.hpp"
#include "sparsemia/experiment/config.hpp"
#include "sparsemia/nn/network.hpp"

namespace sparsemia::experiment {

/// Uninitialized network for `model` on inputs shaped like `dataset`. The
/// imp variant builds the dense architecture; pruning happens in training.
nn::Network build_network(const ModelConfig& model, const data::LabeledDataset& dataset);

/// Trainable parameter count of the dense architecture, the reference for
/// every nonzero percentage.
Index dense_parameter_count(const ModelConfig& model, const data::LabeledDataset& dataset);

}  // namespace sparsemia::experiment
