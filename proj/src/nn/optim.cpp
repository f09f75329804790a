// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsemia::nn {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("train config: epochs must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("train config: batch size must be positive");
  if (!(initial_lr > 0)) throw std::invalid_argument("train config: learning rate must be positive");
  if (momentum < 0 || momentum >= 1) throw std::invalid_argument("train config: momentum in [0, 1)");
  if (nesterov) throw std::invalid_argument("train config: Nesterov momentum is not supported");
  if (weight_decay < 0) throw std::invalid_argument("train config: negative weight decay");
  if (!(lr_drop_factor > 0)) throw std::invalid_argument("train config: drop factor must be positive");
  double previous = 0.0;
  for (double p : lr_drop_points) {
    if (!(p > previous) || !(p < 1.0)) {
      throw std::invalid_argument("train config: drop points must be strictly increasing in (0, 1)");
    }
    previous = p;
  }
}

double lr_at_epoch(const TrainConfig& config, int epoch) {
  double lr = config.initial_lr;
  for (double p : config.lr_drop_points) {
    const int drop_epoch = static_cast<int>(std::floor(p * config.epochs + 1e-9));
    if (epoch >= drop_epoch) lr /= config.lr_drop_factor;
  }
  return lr;
}

void sgd_step(std::span<Parameter* const> params, SgdState& state, const SgdOptions& options) {
  if (state.velocity.size() != params.size()) {
    state.velocity.clear();
    for (const auto* p : params) state.velocity.push_back(Vector::Zero(p->size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Vector& v = state.velocity[i];
    if (v.size() != p.size()) throw std::invalid_argument("sgd_step: velocity shape mismatch");
    if (options.decoupled_weight_decay) {
      v = options.momentum * v + p.grad;
      p.value -= options.lr * (v + options.weight_decay * p.value);
    } else {
      v = options.momentum * v + p.grad + options.weight_decay * p.value;
      p.value -= options.lr * v;
    }
    if (p.mask) {
      for (Index k = 0; k < p.size(); ++k) {
        if (!p.mask->keeps(k)) {
          p.value[k] = 0.0;
          v[k] = 0.0;
        }
      }
    }
  }
}

void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamOptions& options) {
  if (state.first_moment.size() != params.size()) {
    state.first_moment.clear();
    state.second_moment.clear();
    state.step = 0;
    for (const auto* p : params) {
      state.first_moment.push_back(Vector::Zero(p->size()));
      state.second_moment.push_back(Vector::Zero(p->size()));
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Vector& m = state.first_moment[i];
    Vector& s = state.second_moment[i];
    m = options.beta1 * m + (1.0 - options.beta1) * p.grad;
    s = options.beta2 * s + (1.0 - options.beta2) * p.grad.cwiseAbs2();
    p.value.array() -=
        options.lr * (m.array() / c1) / ((s.array() / c2).sqrt() + options.epsilon);
    p.apply_mask();
  }
}

}  // namespace sparsemia::nn
