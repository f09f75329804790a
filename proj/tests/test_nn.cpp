// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "sparsemia/data/synthetic.hpp"
#include "sparsemia/io/binary.hpp"
#include "sparsemia/nn/checkpoint.hpp"
#include "sparsemia/nn/init.hpp"
#include "sparsemia/nn/layers.hpp"
#include "sparsemia/nn/loss.hpp"
#include "sparsemia/nn/optim.hpp"
#include "sparsemia/nn/resnet_shapes.hpp"
#include "sparsemia/nn/train.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace sparsemia;

namespace {

nn::Network small_mlp(Index in, Index hidden, Index classes) {
  nn::Network net;
  net.add<nn::Dense>(in, hidden);
  net.add<nn::ReLU>(hidden);
  net.add<nn::Dense>(hidden, classes);
  return net;
}

data::LabeledDataset blobs(Index n, std::uint64_t seed, double noise = 0.2) {
  data::SyntheticSpec spec{.kind = data::SyntheticKind::blobs, .samples = n, .classes = 3, .noise = noise,
                           .dims = 4, .seed = seed};
  auto d = data::make_synthetic(spec);
  data::normalize(d);
  return d;
}

}  // namespace

TEST(Init, UniformStaysInsideOpenInterval) {
  Rng rng(1);
  const Vector v = nn::init_uniform(20000, 9, rng);
  const double bound = 1.0 / 3.0;
  EXPECT_LT(v.maxCoeff(), bound);
  EXPECT_GT(v.minCoeff(), -bound);
  EXPECT_NEAR(v.mean(), 0.0, 0.01);
  EXPECT_NEAR((v.array().square().mean()), bound * bound / 3.0, 0.002);
}

TEST(Init, DenseLayerUsesFanIn) {
  nn::Dense d(100, 50);
  Rng rng(2);
  d.initialize(rng);
  for (const auto& p : d.parameters()) EXPECT_LT(p.value.cwiseAbs().maxCoeff(), 0.1);
}

TEST(Init, ConvFanInIncludesKernel) {
  nn::Conv2d c({.in_channels = 4, .out_channels = 8, .kernel = 3, .stride = 1, .padding = 1, .in_height = 4,
                .in_width = 4});
  Rng rng(3);
  c.initialize(rng);
  EXPECT_LT(c.parameters()[0].value.cwiseAbs().maxCoeff(), 1.0 / 6.0);
}

TEST(Network, DeepCopyIsIndependent) {
  auto net = small_mlp(3, 4, 2);
  Rng rng(4);
  net.initialize(rng);
  nn::Network copy = net;
  copy.parameters()[0]->value.setZero();
  EXPECT_GT(net.parameters()[0]->value.norm(), 0.0);
}

TEST(Network, RejectsIncompatibleLayers) {
  nn::Network net;
  net.add<nn::Dense>(3, 4);
  EXPECT_THROW(net.add<nn::Dense>(5, 2), std::invalid_argument);
}

TEST(Network, CountParams) {
  auto net = small_mlp(3, 4, 2);
  net.add<nn::BatchNorm>(2, 1);
  // 3·4+4 + 4·2+2 + 2 scale + 2 shift; running statistics are not counted.
  EXPECT_EQ(nn::count_params(net).total, 16 + 10 + 4);
  auto* w = net.parameters()[0];
  w->mask = nn::SparseMask(w->size());
  w->mask->bits[0] = w->mask->bits[5] = 0;
  EXPECT_EQ(nn::count_params(net).nonzero, 28);
}

TEST(Network, SnapshotRestore) {
  auto net = small_mlp(3, 4, 2);
  Rng rng(5);
  net.initialize(rng);
  const auto snap = nn::snapshot(net);
  net.parameters()[1]->value.setConstant(7);
  nn::restore(net, snap);
  EXPECT_EQ(nn::snapshot(net), snap);
  auto other = small_mlp(3, 5, 2);
  EXPECT_THROW(nn::restore(other, snap), std::invalid_argument);
}

TEST(Loss, SoftmaxColumnsSumToOne) {
  std::mt19937_64 rng(6);
  const Matrix p = nn::softmax(oracle::random_matrix(5, 7, rng) * 30);
  for (Index j = 0; j < p.cols(); ++j) EXPECT_NEAR(p.col(j).sum(), 1.0, 1e-12);
  EXPECT_GE(p.minCoeff(), 0.0);
}

TEST(Loss, CrossEntropyKnownValue) {
  Matrix logits = Matrix::Zero(4, 1);
  const std::vector<int> label{2};
  EXPECT_NEAR(nn::cross_entropy(logits, label), std::log(4.0), 1e-12);
  const std::vector<int> bad{4};
  EXPECT_THROW(nn::cross_entropy(logits, bad), std::out_of_range);
}

TEST(Loss, ArgmaxTiesPickLowestIndex) {
  Vector v(4);
  v << 1, 3, 3, 2;
  EXPECT_EQ(nn::argmax(v), 1);
}

TEST(Schedule, StepDrops) {
  nn::TrainConfig c;
  c.epochs = 300;
  c.initial_lr = 0.03;
  EXPECT_DOUBLE_EQ(nn::lr_at_epoch(c, 0), 0.03);
  EXPECT_DOUBLE_EQ(nn::lr_at_epoch(c, 149), 0.03);
  EXPECT_NEAR(nn::lr_at_epoch(c, 150), 0.003, 1e-15);
  EXPECT_NEAR(nn::lr_at_epoch(c, 224), 0.003, 1e-15);
  EXPECT_NEAR(nn::lr_at_epoch(c, 225), 0.0003, 1e-15);
}

TEST(Schedule, RejectsNesterov) {
  nn::TrainConfig c;
  c.nesterov = true;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Optimizer, SgdMatchesHandComputation) {
  nn::Parameter p("w", nn::ParamRole::weight, {2});
  p.value << 1.0, -2.0;
  p.grad << 0.5, 0.25;
  nn::Parameter* ps[] = {&p};
  nn::SgdState state;
  const nn::SgdOptions opt{.lr = 0.1, .momentum = 0.9, .weight_decay = 0.01};
  nn::sgd_step(ps, state, opt);
  // v = g + λw
  const double v0 = 0.5 + 0.01 * 1.0, v1 = 0.25 + 0.01 * -2.0;
  EXPECT_DOUBLE_EQ(p.value[0], 1.0 - 0.1 * v0);
  EXPECT_DOUBLE_EQ(p.value[1], -2.0 - 0.1 * v1);
  const double w0 = p.value[0];
  nn::sgd_step(ps, state, opt);
  const double v0b = 0.9 * v0 + 0.5 + 0.01 * w0;
  EXPECT_DOUBLE_EQ(p.value[0], w0 - 0.1 * v0b);
}

TEST(Optimizer, SgdKeepsMaskedEntriesZero) {
  nn::Parameter p("w", nn::ParamRole::weight, {3});
  p.value << 1, 0, 3;
  p.grad << 1, 1, 1;
  p.mask = nn::SparseMask(3);
  p.mask->bits[1] = 0;
  nn::Parameter* ps[] = {&p};
  nn::SgdState state;
  for (int i = 0; i < 5; ++i) nn::sgd_step(ps, state, {.lr = 0.1, .momentum = 0.9, .weight_decay = 0.1});
  EXPECT_EQ(p.value[1], 0.0);
}

TEST(Optimizer, AdamFirstStepMovesByLearningRate) {
  nn::Parameter p("w", nn::ParamRole::weight, {2});
  p.value << 1.0, 1.0;
  p.grad << 3.0, -0.001;
  nn::Parameter* ps[] = {&p};
  nn::AdamState state;
  nn::adam_step(ps, state, {.lr = 0.01});
  // Bias-corrected first step is lr·g/(|g|+ε').
  EXPECT_NEAR(p.value[0], 1.0 - 0.01, 1e-8);
  EXPECT_NEAR(p.value[1], 1.0 + 0.01, 1e-7);
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  nn::Network net;
  const nn::ConvGeometry g{.in_channels = 2, .out_channels = 4, .kernel = 3, .stride = 1, .padding = 1,
                           .in_height = 4, .in_width = 4};
  net.add<nn::Conv2d>(g);
  net.add<nn::BatchNorm>(4, 16);
  net.add<nn::ReLU>(64);
  net.add<nn::ButterflyConv>(nn::ConvGeometry{.in_channels = 4, .out_channels = 4, .kernel = 3, .stride = 1,
                                              .padding = 1, .in_height = 4, .in_width = 4},
                             2);
  net.add<nn::AvgPool>(4, 16);
  net.add<nn::ButterflyLinear>(4, 8, 2);
  net.add<nn::Dense>(8, 3);
  Rng rng(7);
  net.initialize(rng);
  auto* w = net.parameters()[0];
  w->mask = nn::SparseMask(w->size());
  for (Index i = 0; i < w->size(); i += 3) w->mask->bits[static_cast<std::size_t>(i)] = 0;
  net.apply_masks();

  std::stringstream buf;
  nn::write_checkpoint(buf, net);
  const auto back = nn::read_checkpoint(buf);
  ASSERT_EQ(back.size(), net.size());
  for (std::size_t i = 0; i < net.size(); ++i) EXPECT_EQ(back.layer(i).kind(), net.layer(i).kind());
  EXPECT_EQ(nn::snapshot(back), nn::snapshot(net));
  EXPECT_EQ(back.parameters()[0]->mask, w->mask);
  std::mt19937_64 r(8);
  const Matrix x = oracle::random_matrix(32, 2, r);
  EXPECT_EQ(back.infer(x), net.infer(x));
}

TEST(Checkpoint, DetectsCorruption) {
  auto net = small_mlp(2, 3, 2);
  std::stringstream buf;
  nn::write_checkpoint(buf, net);
  std::string bytes = buf.str();
  std::stringstream cut(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(nn::read_checkpoint(cut), io::TruncatedInput);
  bytes[0] = 'X';
  std::stringstream bad(bytes);
  EXPECT_THROW(nn::read_checkpoint(bad), io::BadHeader);
}

TEST(Checkpoint, MaskPackingIsLsbFirst) {
  nn::SparseMask m(10, 0);
  m.bits[0] = m.bits[3] = m.bits[9] = 1;
  const auto packed = nn::pack_mask(m);
  ASSERT_EQ(packed.size(), 2u);
  EXPECT_EQ(packed[0], 0b00001001);
  EXPECT_EQ(packed[1], 0b00000010);
  EXPECT_EQ(nn::unpack_mask(packed, 10), m);
}

TEST(ResNet20, TotalParameters) {
  EXPECT_EQ(nn::resnet20_shape().param_count(), 272474);
  EXPECT_EQ(nn::resnet20_shape().convs.size(), 21u);
}

TEST(ResNet20, ButterflyFractions) {
  const double expected[2][3] = {{32.3, 15.9, 11.8}, {29.6, 12.9, 8.5}};
  for (int depth = 2; depth <= 3; ++depth) {
    for (int s = 1; s <= 3; ++s) {
      EXPECT_NEAR(nn::resnet20_butterfly_fraction(s, depth), expected[depth - 2][s - 1], 0.5)
          << "S=" << s << " L=" << depth;
    }
  }
  EXPECT_DOUBLE_EQ(nn::resnet20_butterfly_fraction(0, 2), 100.0);
}

TEST(Train, LearnsSeparableBlobs) {
  const auto train_set = blobs(300, 1);
  const auto val_set = blobs(150, 2);
  nn::TrainConfig c;
  c.epochs = 15;
  c.batch_size = 32;
  c.initial_lr = 0.05;
  c.weight_decay = 0;
  auto net = small_mlp(4, 16, 3);
  Rng rng(3);
  net.initialize(rng);
  const auto model = nn::train(net, train_set, val_set, c);
  EXPECT_EQ(model.history.size(), 15u);
  EXPECT_GE(nn::accuracy(model.network, val_set), 95.0);
  EXPECT_GE(model.best_epoch, 0);
  EXPECT_DOUBLE_EQ(model.history[static_cast<std::size_t>(model.best_epoch)].val_accuracy,
                   nn::accuracy(model.best_network(), val_set));
}

TEST(Train, BitwiseDeterministic) {
  const auto train_set = blobs(200, 4, 1.0);
  nn::TrainConfig c;
  c.epochs = 5;
  c.seed = 99;
  auto net = small_mlp(4, 8, 3);
  Rng rng(5);
  net.initialize(rng);
  const auto a = nn::train(net, train_set, train_set, c);
  const auto b = nn::train(net, train_set, train_set, c);
  EXPECT_EQ(nn::snapshot(a.network), nn::snapshot(b.network));
  c.seed = 100;
  const auto d = nn::train(net, train_set, train_set, c);
  EXPECT_NE(nn::snapshot(a.network), nn::snapshot(d.network));
}

TEST(Train, MaskedWeightsStayZero) {
  const auto train_set = blobs(200, 6, 0.5);
  auto net = small_mlp(4, 8, 3);
  Rng rng(7);
  net.initialize(rng);
  auto* w = net.parameters()[0];
  w->mask = nn::SparseMask(w->size());
  for (Index i = 0; i < w->size(); i += 2) w->mask->bits[static_cast<std::size_t>(i)] = 0;
  net.apply_masks();
  nn::TrainConfig c;
  c.epochs = 4;
  const auto model = nn::train(net, train_set, train_set, c);
  const auto* trained = model.network.parameters()[0];
  for (Index i = 0; i < trained->size(); i += 2) EXPECT_EQ(trained->value[i], 0.0);
}

TEST(Train, RejectsEmptyData) {
  data::LabeledDataset empty;
  empty.classes = 3;
  empty.inputs.resize(4, 0);
  auto net = small_mlp(4, 8, 3);
  EXPECT_THROW(nn::train(net, empty, blobs(10, 1), {}), std::invalid_argument);
}
