// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/experiment/models.hpp"

#include "sparsemia/nn/layers.hpp"

#include <stdexcept>

namespace sparsemia::experiment {

namespace {

bool factorized(const ModelConfig& model, int segment) {
  return model.variant == Variant::butterfly && segment >= model.segments - model.butterfly_segments;
}

nn::Network build_mlp(const ModelConfig& model, const data::LabeledDataset& dataset) {
  nn::Network net;
  const Index w = model.width;
  net.add<nn::Dense>(dataset.feature_size(), w);
  net.add<nn::ReLU>(w);
  for (int s = 0; s < model.segments; ++s) {
    if (factorized(model, s)) {
      net.add<nn::ButterflyLinear>(w, w, model.butterfly_depth);
    } else {
      net.add<nn::Dense>(w, w);
    }
    net.add<nn::ReLU>(w);
  }
  net.add<nn::Dense>(w, dataset.classes);
  return net;
}

nn::Network build_cnn(const ModelConfig& model, const data::LabeledDataset& dataset) {
  if (!dataset.image) throw std::invalid_argument("cnn models need image-shaped data");
  const auto& shape = *dataset.image;
  nn::Network net;
  nn::ConvGeometry stem{.in_channels = shape.channels, .out_channels = model.width, .kernel = 3, .stride = 2,
                        .padding = 1, .in_height = shape.height, .in_width = shape.width};
  net.add<nn::Conv2d>(stem);
  const Index h = stem.out_height();
  const Index w = stem.out_width();
  net.add<nn::BatchNorm>(model.width, h * w);
  net.add<nn::ReLU>(model.width * h * w);
  const nn::ConvGeometry block{.in_channels = model.width, .out_channels = model.width, .kernel = 3, .stride = 1,
                               .padding = 1, .in_height = h, .in_width = w};
  for (int s = 0; s < model.segments; ++s) {
    if (factorized(model, s)) {
      net.add<nn::ButterflyConv>(block, model.butterfly_depth);
    } else {
      net.add<nn::Conv2d>(block);
    }
    net.add<nn::BatchNorm>(model.width, h * w);
    net.add<nn::ReLU>(model.width * h * w);
  }
  net.add<nn::AvgPool>(model.width, h * w);
  net.add<nn::Dense>(model.width, dataset.classes);
  return net;
}

}  // namespace

nn::Network build_network(const ModelConfig& model, const data::LabeledDataset& dataset) {
  model.validate();
  return model.arch == Architecture::mlp ? build_mlp(model, dataset) : build_cnn(model, dataset);
}

Index dense_parameter_count(const ModelConfig& model, const data::LabeledDataset& dataset) {
  ModelConfig dense = model;
  dense.variant = Variant::dense;
  return nn::count_params(build_network(dense, dataset)).total;
}

}  // namespace sparsemia::experiment
