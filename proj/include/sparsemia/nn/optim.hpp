// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/parameter.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sparsemia::nn {

struct TrainConfig {
  int epochs = 60;
  Index batch_size = 64;
  double initial_lr = 0.03;
  double momentum = 0.9;
  /// Nesterov momentum is not supported; validate() rejects `true`.
  bool nesterov = false;
  double weight_decay = 0.005;
  /// Coupled decay adds λw to the gradient before the momentum buffer;
  /// decoupled decay subtracts lr·λ·w separately.
  bool decoupled_weight_decay = false;
  /// Fractions of `epochs` at which the learning rate is divided.
  std::vector<double> lr_drop_points{0.5, 0.75};
  double lr_drop_factor = 10.0;
  std::uint64_t seed = 0;
  /// Flip/crop augmentation, applied only to image datasets.
  bool augment = true;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Step schedule: the rate is divided by lr_drop_factor once for every drop
/// point p with epoch ≥ ⌊p·epochs⌋.
double lr_at_epoch(const TrainConfig& config, int epoch);

struct SgdOptions {
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0;
  bool decoupled_weight_decay = false;
};

struct SgdState {
  std::vector<Vector> velocity;
};

/// Heavy-ball SGD: v ← μv + (g + λw), w ← w − lr·v. Masked entries stay 0.
void sgd_step(std::span<Parameter* const> params, SgdState& state, const SgdOptions& options);

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;
  std::int64_t step = 0;
};

/// Adam with bias correction and no weight decay.
void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamOptions& options);

}  // namespace sparsemia::nn
