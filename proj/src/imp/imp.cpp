// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/imp/imp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sparsemia::imp {

void ImpSchedule::validate() const {
  if (rounds < 0) throw std::invalid_argument("imp: rounds must be non-negative");
  if (!(prune_fraction > 0 && prune_fraction < 1)) {
    throw std::invalid_argument("imp: prune fraction must lie in (0, 1)");
  }
}

nn::SparseMask magnitude_prune(const Vector& weights, const nn::SparseMask& mask, double fraction) {
  if (!(fraction > 0 && fraction < 1)) throw std::domain_error("magnitude_prune: fraction outside (0, 1)");
  if (mask.size() != weights.size()) throw std::invalid_argument("magnitude_prune: mask size mismatch");
  std::vector<Index> kept;
  for (Index i = 0; i < weights.size(); ++i) {
    if (mask.keeps(i)) kept.push_back(i);
  }
  const auto count = static_cast<Index>(kept.size());
  const auto to_prune = static_cast<Index>(std::floor(fraction * static_cast<double>(count)));
  if (count - to_prune < 1) throw std::domain_error("magnitude_prune: pruning would empty the mask");
  std::stable_sort(kept.begin(), kept.end(), [&](Index a, Index b) {
    return std::abs(weights[a]) < std::abs(weights[b]);
  });
  nn::SparseMask out = mask;
  for (Index k = 0; k < to_prune; ++k) out.bits[static_cast<std::size_t>(kept[static_cast<std::size_t>(k)])] = 0;
  return out;
}

std::vector<nn::Parameter*> prunable_parameters(nn::Network& network, const ImpSchedule& schedule) {
  std::vector<nn::Parameter*> out;
  for (auto* p : network.parameters()) {
    if (p->prunable() || (schedule.prune_biases && p->role == nn::ParamRole::bias)) out.push_back(p);
  }
  return out;
}

void prune(nn::Network& network, const ImpSchedule& schedule) {
  auto params = prunable_parameters(network, schedule);
  if (params.empty()) throw std::invalid_argument("prune: network has no prunable parameters");
  for (auto* p : params) {
    if (!p->mask) p->mask = nn::SparseMask(p->size());
  }
  if (schedule.global) {
    Index total = 0;
    for (auto* p : params) total += p->size();
    Vector weights(total);
    nn::SparseMask mask;
    mask.bits.reserve(static_cast<std::size_t>(total));
    Index offset = 0;
    for (auto* p : params) {
      weights.segment(offset, p->size()) = p->value;
      mask.bits.insert(mask.bits.end(), p->mask->bits.begin(), p->mask->bits.end());
      offset += p->size();
    }
    const auto pruned = magnitude_prune(weights, mask, schedule.prune_fraction);
    offset = 0;
    for (auto* p : params) {
      auto first = pruned.bits.begin() + offset;
      p->mask->bits.assign(first, first + p->size());
      offset += p->size();
    }
  } else {
    for (auto* p : params) *p->mask = magnitude_prune(p->value, *p->mask, schedule.prune_fraction);
  }
  network.apply_masks();
}

void rewind(nn::Network& network, const nn::ParameterSnapshot& checkpoint) {
  nn::restore(network, checkpoint);
  network.apply_masks();
}

std::vector<Index> survivor_counts(Index initial, double fraction, int rounds) {
  std::vector<Index> n{initial};
  for (int k = 0; k < rounds; ++k) {
    n.push_back(n.back() - static_cast<Index>(std::floor(fraction * static_cast<double>(n.back()))));
  }
  return n;
}

std::vector<ImpRound> imp_run(nn::Network network, const data::LabeledDataset& train_set,
                              const data::LabeledDataset& val_set, const nn::TrainConfig& config,
                              const ImpSchedule& schedule,
                              const std::function<void(const ImpRound&)>& on_round) {
  schedule.validate();
  std::vector<ImpRound> rounds;
  for (int round = 0; round <= schedule.rounds; ++round) {
    if (round > 0) {
      const auto& previous = rounds.back().model;
      network = previous.network;
      rewind(network, previous.best_checkpoint);
      prune(network, schedule);
    }
    nn::TrainConfig round_config = config;
    round_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(round));

    ImpRound r;
    r.round = round;
    for (auto* p : prunable_parameters(network, schedule)) {
      r.prunable += p->size();
      r.survivors += p->active_count();
    }
    r.model = nn::train(network, train_set, val_set, round_config);
    for (auto* p : prunable_parameters(r.model.network, schedule)) {
      r.masks.push_back(p->mask ? *p->mask : nn::SparseMask(p->size()));
    }
    if (on_round) on_round(r);
    rounds.push_back(std::move(r));
  }
  return rounds;
}

}  // namespace sparsemia::imp
