// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/dataset.hpp"
#include "sparsemia/nn/network.hpp"
#include "sparsemia/nn/optim.hpp"

#include <vector>

namespace sparsemia::nn {

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0;
  double train_loss = 0;
  double val_accuracy = 0;
};

struct TrainedModel {
  /// Weights after the last epoch.
  Network network;
  std::vector<EpochRecord> history;
  /// Epoch with the highest validation accuracy (earliest on ties); -1 when
  /// no epoch ran, in which case best_checkpoint holds the initial weights.
  int best_epoch = -1;
  ParameterSnapshot best_checkpoint;

  /// Copy of `network` carrying the best-validation weights.
  [[nodiscard]] Network best_network() const;
};

/// Mini-batch SGD with momentum, weight decay and the step schedule of
/// `config`. Samples are reshuffled every epoch from a stream seeded by
/// config.seed, so identical inputs give bitwise-identical results.
/// Throws std::invalid_argument on an empty training or validation set.
TrainedModel train(Network network, const data::LabeledDataset& train_set,
                   const data::LabeledDataset& val_set, const TrainConfig& config);

}  // namespace sparsemia::nn
