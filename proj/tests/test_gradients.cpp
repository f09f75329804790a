// SPDX-License-Identifier: Apache-2.0
// Analytic gradients against central finite differences.
#include "oracles.hpp"

#include "sparsemia/nn/layers.hpp"
#include "sparsemia/nn/loss.hpp"
#include "sparsemia/nn/network.hpp"

#include <gtest/gtest.h>

using namespace sparsemia;

namespace {

constexpr double kTolerance = 1e-5;

double rel(const Vector& a, const Vector& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

/// Checks d/dθ sum(R ⊙ net(x)) and d/dx for every parameter of `net`.
void check_network(nn::Network& net, Index batch, std::uint64_t seed, nn::Mode mode = nn::Mode::train) {
  std::mt19937_64 rng(seed);
  Rng init(seed);
  net.initialize(init);
  const Matrix x = oracle::random_matrix(net.input_size(), batch, rng);
  const Matrix r = oracle::random_matrix(net.output_size(), batch, rng);

  net.zero_grad();
  net.forward(x, mode);
  const Matrix dx = net.backward(r);

  auto loss_at = [&](const Matrix& input) { return (net.forward(input, mode).array() * r.array()).sum(); };

  const Vector flat_x = Eigen::Map<const Vector>(x.data(), x.size());
  const Vector num_dx = oracle::numeric_gradient(
      [&](const Vector& v) { return loss_at(Eigen::Map<const Matrix>(v.data(), x.rows(), x.cols())); }, flat_x);
  EXPECT_LE(rel(Eigen::Map<const Vector>(dx.data(), dx.size()), num_dx), kTolerance) << "input gradient";

  for (auto* p : net.trainable_parameters()) {
    const Vector analytic = p->grad;
    const Vector numeric = oracle::numeric_gradient(
        [&](const Vector& v) {
          const Vector saved = p->value;
          p->value = v;
          const double l = loss_at(x);
          p->value = saved;
          return l;
        },
        p->value);
    if (p->mask) {
      Vector a_kept = analytic, n_kept = numeric;
      for (Index i = 0; i < p->size(); ++i) {
        if (!p->mask->keeps(i)) {
          EXPECT_EQ(analytic[i], 0.0) << p->name << " masked entry " << i;
          a_kept[i] = n_kept[i] = 0;
        }
      }
      EXPECT_LE(rel(a_kept, n_kept), kTolerance) << p->name;
    } else {
      EXPECT_LE(rel(analytic, numeric), kTolerance) << p->name;
    }
  }
}

template <typename L, typename... Args>
nn::Network single(Args&&... args) {
  nn::Network net;
  net.add<L>(std::forward<Args>(args)...);
  return net;
}

void mask_weights(nn::Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(0.6);
  for (auto* p : net.parameters()) {
    if (!p->prunable()) continue;
    nn::SparseMask m(p->size());
    for (auto& b : m.bits) b = keep(rng) ? 1 : 0;
    p->mask = m;
  }
  net.apply_masks();
}

const nn::ConvGeometry kConv{.in_channels = 2, .out_channels = 3, .kernel = 3, .stride = 1, .padding = 1,
                             .in_height = 5, .in_width = 4};
const nn::ConvGeometry kStridedConv{.in_channels = 2, .out_channels = 4, .kernel = 3, .stride = 2, .padding = 1,
                                    .in_height = 6, .in_width = 5};

}  // namespace

TEST(Gradient, Dense) {
  auto net = single<nn::Dense>(7, 5);
  check_network(net, 4, 1);
}

TEST(Gradient, DenseWithoutBias) {
  auto net = single<nn::Dense>(6, 3, false);
  check_network(net, 3, 2);
}

TEST(Gradient, Conv) {
  auto net = single<nn::Conv2d>(kConv, true);
  check_network(net, 3, 3);
}

TEST(Gradient, StridedConv) {
  auto net = single<nn::Conv2d>(kStridedConv);
  check_network(net, 2, 4);
}

TEST(Gradient, MaskedDense) {
  auto net = single<nn::Dense>(8, 6);
  Rng init(5);
  net.initialize(init);
  mask_weights(net, 5);
  EXPECT_EQ(net.layer(0).kind(), nn::LayerKind::masked_dense);
  check_network(net, 4, 6);
}

TEST(Gradient, MaskedConv) {
  auto net = single<nn::Conv2d>(kConv);
  Rng init(7);
  net.initialize(init);
  mask_weights(net, 7);
  EXPECT_EQ(net.layer(0).kind(), nn::LayerKind::masked_conv);
  check_network(net, 2, 8);
}

TEST(Gradient, ButterflySquare) {
  auto net = single<nn::ButterflyLinear>(16, 16, 4);
  check_network(net, 3, 9);
}

TEST(Gradient, ButterflyRectangular) {
  auto net = single<nn::ButterflyLinear>(12, 24, 2);
  check_network(net, 3, 10);
  auto shrink = single<nn::ButterflyLinear>(24, 6, 2, false);
  check_network(shrink, 3, 11);
}

TEST(Gradient, ButterflyConv) {
  nn::ConvGeometry g = kConv;
  g.in_channels = 4;
  g.out_channels = 8;
  auto net = single<nn::ButterflyConv>(g, 2);
  check_network(net, 2, 12);
}

TEST(Gradient, BatchNormTrainMode) {
  auto net = single<nn::BatchNorm>(3, 4);
  check_network(net, 5, 13);
}

TEST(Gradient, BatchNormEvalMode) {
  auto net = single<nn::BatchNorm>(3, 4);
  check_network(net, 5, 14, nn::Mode::eval);
}

TEST(Gradient, PoolingAndActivation) {
  nn::Network net;
  net.add<nn::Dense>(6, 12);
  net.add<nn::ReLU>(12);
  net.add<nn::AvgPool>(3, 4);
  check_network(net, 3, 15);
}

TEST(Gradient, SmallCnn) {
  nn::Network net;
  net.add<nn::Conv2d>(kConv);
  net.add<nn::BatchNorm>(3, 20);
  net.add<nn::ReLU>(60);
  net.add<nn::AvgPool>(3, 20);
  net.add<nn::Dense>(3, 4);
  check_network(net, 3, 16);
}

TEST(Gradient, CrossEntropy) {
  std::mt19937_64 rng(17);
  const Matrix logits = oracle::random_matrix(5, 4, rng);
  const std::vector<int> labels{0, 3, 4, 1};
  Matrix grad;
  nn::cross_entropy(logits, labels, grad);
  const Vector flat = Eigen::Map<const Vector>(logits.data(), logits.size());
  const Vector numeric = oracle::numeric_gradient(
      [&](const Vector& v) { return nn::cross_entropy(Eigen::Map<const Matrix>(v.data(), 5, 4), labels); }, flat);
  EXPECT_LE(rel(Eigen::Map<const Vector>(grad.data(), grad.size()), numeric), kTolerance);
}
