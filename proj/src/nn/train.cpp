// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/train.hpp"

#include "sparsemia/data/augment.hpp"
#include "sparsemia/nn/loss.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sparsemia::nn {

Network TrainedModel::best_network() const {
  Network net = network;
  restore(net, best_checkpoint);
  return net;
}

TrainedModel train(Network network, const data::LabeledDataset& train_set,
                   const data::LabeledDataset& val_set, const TrainConfig& config) {
  config.validate();
  if (train_set.size() == 0) throw std::invalid_argument("train: empty training set");
  if (val_set.size() == 0) throw std::invalid_argument("train: empty validation set");
  if (train_set.feature_size() != network.input_size()) {
    throw std::invalid_argument("train: dataset features do not match the network input");
  }

  Rng shuffle_rng(derive_seed(config.seed, 1));
  Rng augment_rng(derive_seed(config.seed, 2));
  const bool augment = config.augment && train_set.image.has_value();

  TrainedModel result;
  result.best_checkpoint = snapshot(network);
  double best_accuracy = -1.0;
  SgdState state;
  std::vector<Index> order(static_cast<std::size_t>(train_set.size()));
  std::iota(order.begin(), order.end(), Index{0});
  auto params = network.trainable_parameters();
  network.apply_masks();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const SgdOptions options{lr_at_epoch(config, epoch), config.momentum, config.weight_decay,
                             config.decoupled_weight_decay};
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t n = std::min(order.size() - start, static_cast<std::size_t>(config.batch_size));
      Matrix batch(train_set.feature_size(), static_cast<Index>(n));
      std::vector<int> labels(n);
      for (std::size_t k = 0; k < n; ++k) {
        batch.col(static_cast<Index>(k)) = train_set.inputs.col(order[start + k]);
        labels[k] = train_set.labels[static_cast<std::size_t>(order[start + k])];
      }
      if (augment) batch = data::augment(batch, train_set.image, augment_rng).batch;
      network.zero_grad();
      Matrix grad;
      const double loss = cross_entropy(network.forward(batch, Mode::train), labels, grad);
      network.backward(grad);
      sgd_step(params, state, options);
      loss_sum += loss * static_cast<double>(n);
    }
    const double val_acc = accuracy(network, val_set);
    result.history.push_back(
        {epoch, options.lr, loss_sum / static_cast<double>(order.size()), val_acc});
    if (val_acc > best_accuracy) {
      best_accuracy = val_acc;
      result.best_epoch = epoch;
      result.best_checkpoint = snapshot(network);
    }
  }
  result.network = std::move(network);
  return result;
}

}  // namespace sparsemia::nn
