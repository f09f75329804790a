// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/train.hpp"

#include <functional>
#include <vector>

namespace sparsemia::imp {

struct ImpSchedule {
  int rounds = 24;
  double prune_fraction = 0.2;
  /// Rank magnitudes across all prunable tensors at once; otherwise each
  /// tensor loses the same fraction independently.
  bool global = true;
  /// Treat biases as prunable in addition to conv and dense weights.
  bool prune_biases = false;

  void validate() const;
};

/// New mask keeping all but the ⌊fraction·(kept count)⌋ smallest-|w| kept
/// entries. Equal magnitudes are pruned in increasing index order. The result
/// is a subset of `mask`. Throws std::domain_error if nothing would survive or
/// fraction ∉ (0, 1).
nn::SparseMask magnitude_prune(const Vector& weights, const nn::SparseMask& mask, double fraction);

/// Parameters that IMP may prune under `schedule`, in network order.
std::vector<nn::Parameter*> prunable_parameters(nn::Network& network, const ImpSchedule& schedule);

/// Prunes the network in place (attaching masks where missing) and zeroes
/// the pruned weights.
void prune(nn::Network& network, const ImpSchedule& schedule);

/// Loads checkpoint values into the network and re-applies its masks, so
/// surviving weights take the checkpoint values and pruned ones are 0.
void rewind(nn::Network& network, const nn::ParameterSnapshot& checkpoint);

struct ImpRound {
  int round = 0;
  /// Surviving prunable entries.
  Index survivors = 0;
  Index prunable = 0;
  nn::TrainedModel model;
  /// Masks of the prunable parameters, in prunable_parameters() order.
  std::vector<nn::SparseMask> masks;

  [[nodiscard]] double survivor_fraction() const {
    return prunable == 0 ? 1.0 : static_cast<double>(survivors) / static_cast<double>(prunable);
  }
};

/// Integer survivor recurrence n_{k+1} = n_k − ⌊fraction·n_k⌋.
std::vector<Index> survivor_counts(Index initial, double fraction, int rounds);

/// Round 0 trains the dense network. Each later round rewinds to the previous
/// round's best-validation checkpoint, prunes, then retrains with the masks
/// frozen. Returns rounds + 1 entries. `on_round`, when set, is invoked as
/// each round completes.
std::vector<ImpRound> imp_run(nn::Network network, const data::LabeledDataset& train_set,
                              const data::LabeledDataset& val_set,
                              const nn::TrainConfig& config, const ImpSchedule& schedule,
                              const std::function<void(const ImpRound&)>& on_round = {});

}  // namespace sparsemia::imp
