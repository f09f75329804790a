// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/resnet_shapes.hpp"

#include "sparsemia/butterfly/chain.hpp"

#include <stdexcept>

namespace sparsemia::nn {

Index ResNetShape::param_count() const noexcept {
  Index total = fc_inputs * classes + classes;
  for (const auto& c : convs) total += c.weight_count();
  for (Index ch : batchnorms) total += 2 * ch;
  return total;
}

ResNetShape resnet20_shape(Index classes) {
  constexpr int kBlocksPerStage = 3;
  ResNetShape net;
  net.classes = classes;
  net.convs.push_back({3, 16, 3, 0, false});
  net.batchnorms.push_back(16);
  Index in = 16;
  for (int stage = 1; stage <= 3; ++stage) {
    const Index width = Index{16} << (stage - 1);
    for (int block = 0; block < kBlocksPerStage; ++block) {
      net.convs.push_back({in, width, 3, stage, false});
      net.batchnorms.push_back(width);
      net.convs.push_back({width, width, 3, stage, false});
      net.batchnorms.push_back(width);
      if (in != width) {
        net.convs.push_back({in, width, 1, stage, true});
        net.batchnorms.push_back(width);
      }
      in = width;
    }
  }
  net.fc_inputs = in;
  return net;
}

double resnet20_butterfly_fraction(int segments, int depth) {
  if (segments < 0 || segments > 3) throw std::domain_error("segments must be in [0, 3]");
  const auto net = resnet20_shape();
  const Index dense = net.param_count();
  Index total = dense;
  for (const auto& c : net.convs) {
    if (c.stage <= 3 - segments || c.projection || c.kernel != 3) continue;
    const auto chain = butterfly::select_min_param_chain(c.out_channels,
                                                         c.in_channels * c.kernel * c.kernel, depth);
    total += chain.param_count() - c.weight_count();
  }
  return 100.0 * static_cast<double>(total) / static_cast<double>(dense);
}

}  // namespace sparsemia::nn
