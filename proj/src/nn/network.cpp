// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/network.hpp"

#include <stdexcept>
#include <string>

namespace sparsemia::nn {

Network::Network(const Network& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Network::push_back(std::unique_ptr<Layer> layer) {
  if (!layers_.empty() && layers_.back()->output_size() != layer->input_size()) {
    throw std::invalid_argument("Network: layer " + std::to_string(layers_.size()) +
                                " expects " + std::to_string(layer->input_size()) +
                                " inputs but the previous layer produces " +
                                std::to_string(layers_.back()->output_size()));
  }
  layers_.push_back(std::move(layer));
}

Index Network::input_size() const { return layers_.empty() ? 0 : layers_.front()->input_size(); }
Index Network::output_size() const { return layers_.empty() ? 0 : layers_.back()->output_size(); }

Matrix Network::forward(const Matrix& batch, Mode mode) {
  if (layers_.empty()) throw std::logic_error("Network: no layers");
  Matrix x = layers_.front()->forward(batch, mode);
  for (std::size_t i = 1; i < layers_.size(); ++i) x = layers_[i]->forward(x, mode);
  return x;
}

Matrix Network::backward(const Matrix& grad_logits) {
  Matrix g = grad_logits;
  for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(g);
  return g;
}

Matrix Network::infer(const Matrix& batch) const {
  if (layers_.empty()) throw std::logic_error("Network: no layers");
  Matrix x = layers_.front()->infer(batch);
  for (std::size_t i = 1; i < layers_.size(); ++i) x = layers_[i]->infer(x);
  return x;
}

void Network::initialize(Rng& rng) {
  for (auto& l : layers_) l->initialize(rng);
}

void Network::zero_grad() {
  for (auto* p : parameters()) p->grad.setZero();
}

void Network::apply_masks() {
  for (auto* p : parameters()) p->apply_mask();
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    for (auto& p : l->parameters()) out.push_back(&p);
  }
  return out;
}

std::vector<const Parameter*> Network::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : layers_) {
    for (const auto& p : std::as_const(*l).parameters()) out.push_back(&p);
  }
  return out;
}

std::vector<Parameter*> Network::trainable_parameters() {
  std::vector<Parameter*> out;
  for (auto* p : parameters()) {
    if (p->trainable()) out.push_back(p);
  }
  return out;
}

ParameterSnapshot snapshot(const Network& network) {
  ParameterSnapshot s;
  for (const auto* p : network.parameters()) s.push_back(p->value);
  return s;
}

void restore(Network& network, const ParameterSnapshot& values) {
  auto params = network.parameters();
  if (params.size() != values.size()) {
    throw std::invalid_argument("restore: parameter count differs from snapshot");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->size() != values[i].size()) {
      throw std::invalid_argument("restore: shape mismatch for " + params[i]->name);
    }
    params[i]->value = values[i];
  }
}

ParamCount count_params(const Network& network) {
  ParamCount c;
  for (const auto* p : network.parameters()) {
    if (!p->trainable()) continue;
    c.total += p->size();
    c.nonzero += p->active_count();
  }
  return c;
}

}  // namespace sparsemia::nn
