// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "sparsemia/data/augment.hpp"
#include "sparsemia/data/image_io.hpp"
#include "sparsemia/data/synthetic.hpp"
#include "sparsemia/nn/layers.hpp"
#include "sparsemia/nn/loss.hpp"
#include "sparsemia/nn/train.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace sparsemia;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sparsemia_test_data";
  fs::create_directories(dir);
  return dir / name;
}

data::LabeledDataset tiny_images(Index n) {
  data::LabeledDataset d;
  d.image = data::ImageShape{3, 4, 5};
  d.classes = 10;
  d.inputs.resize(60, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < 60; ++i) d.inputs(i, j) = static_cast<double>((i * 7 + j * 13) % 256) / 255.0;
    d.labels.push_back(static_cast<int>(j % 10));
  }
  return d;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

data::DatasetErrorKind load_error(const fs::path& p) {
  try {
    data::load_image_dataset(p);
  } catch (const data::DatasetError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return data::DatasetErrorKind::io;
}

}  // namespace

TEST(Synthetic, SameSeedSameData) {
  data::SyntheticSpec spec{.kind = data::SyntheticKind::spirals, .samples = 300, .classes = 3, .seed = 4};
  const auto a = data::make_synthetic(spec);
  const auto b = data::make_synthetic(spec);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.labels, b.labels);
  spec.seed = 5;
  EXPECT_NE(data::make_synthetic(spec).inputs, a.inputs);
}

TEST(Synthetic, LabelsBalancedAndInRange) {
  const auto d = data::make_synthetic({.kind = data::SyntheticKind::blobs, .samples = 400, .classes = 4});
  EXPECT_NO_THROW(d.validate());
  for (int c = 0; c < 4; ++c) EXPECT_EQ(std::count(d.labels.begin(), d.labels.end(), c), 100);
}

TEST(Synthetic, NoiselessBlobsAreLinearlySeparable) {
  auto d = data::make_synthetic({.kind = data::SyntheticKind::blobs, .samples = 400, .classes = 5, .noise = 0.0});
  data::normalize(d);
  nn::Network probe;
  probe.add<nn::Dense>(2, 5);
  Rng rng(1);
  probe.initialize(rng);
  nn::TrainConfig c;
  c.epochs = 40;
  c.initial_lr = 0.1;
  c.weight_decay = 0;
  const auto model = nn::train(probe, d, d, c);
  EXPECT_DOUBLE_EQ(nn::accuracy(model.network, d), 100.0);
}

TEST(Synthetic, SpiralsLearnableByTwoHiddenLayers) {
  auto d = data::make_synthetic({.kind = data::SyntheticKind::spirals, .samples = 2000, .classes = 2,
                                 .noise = 0.05, .seed = 3});
  data::normalize(d);
  std::vector<Index> train_idx, test_idx;
  for (Index i = 0; i < d.size(); ++i) (i % 4 == 0 ? test_idx : train_idx).push_back(i);
  const auto train_set = data::subset(d, train_idx);
  const auto test_set = data::subset(d, test_idx);
  nn::Network net;
  net.add<nn::Dense>(2, 64);
  net.add<nn::ReLU>(64);
  net.add<nn::Dense>(64, 64);
  net.add<nn::ReLU>(64);
  net.add<nn::Dense>(64, 2);
  Rng rng(2);
  net.initialize(rng);
  nn::TrainConfig c;
  c.epochs = 60;
  c.initial_lr = 0.05;
  c.weight_decay = 0;
  c.batch_size = 32;
  const auto model = nn::train(net, train_set, test_set, c);
  EXPECT_GE(nn::accuracy(model.network, test_set), 90.0);
}

TEST(Normalization, AppliedExactlyOnce) {
  auto d = tiny_images(6);
  data::normalize(d);
  EXPECT_TRUE(d.normalization.applied);
  EXPECT_EQ(d.normalization.mean.size(), 3u);
  EXPECT_THROW(data::normalize(d), std::logic_error);
  for (Index c = 0; c < 3; ++c) {
    const auto block = d.inputs.middleRows(c * 20, 20);
    EXPECT_NEAR(block.mean(), 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt(block.array().square().mean()), 1.0, 1e-12);
  }
}

TEST(Normalization, NonImageFeaturesArePerFeature) {
  auto d = data::make_synthetic({.kind = data::SyntheticKind::blobs, .samples = 100, .classes = 2, .dims = 3});
  data::normalize(d);
  EXPECT_EQ(d.normalization.mean.size(), 3u);
  for (Index r = 0; r < 3; ++r) EXPECT_NEAR(d.inputs.row(r).mean(), 0.0, 1e-12);
}

TEST(Augment, DoubleFlipIsIdentity) {
  const auto d = tiny_images(1);
  const Vector x = d.inputs.col(0);
  const Vector f = data::flip_horizontal(x, *d.image);
  EXPECT_NE(f, x);
  EXPECT_EQ(data::flip_horizontal(f, *d.image), x);
  EXPECT_EQ(f[0], x[4]);
}

TEST(Augment, CenteredCropIsIdentity) {
  const auto d = tiny_images(1);
  const Vector x = d.inputs.col(0);
  EXPECT_EQ(data::crop_padded(x, *d.image, 4, 4, 4), x);
  const Vector shifted = data::crop_padded(x, *d.image, 4, 0, 0);
  EXPECT_EQ(shifted.size(), x.size());
  // Top-left corner comes from the zero padding.
  EXPECT_EQ(shifted[0], 0.0);
  EXPECT_EQ(shifted[4 * 5 + 4], x[0]);
}

TEST(Augment, PreservesShapeAndPassesThroughFlatData) {
  const auto d = tiny_images(8);
  Rng rng(3);
  const auto out = data::augment(d.inputs, d.image, rng);
  EXPECT_FALSE(out.passthrough);
  EXPECT_EQ(out.batch.rows(), d.inputs.rows());
  EXPECT_EQ(out.batch.cols(), d.inputs.cols());
  const auto flat = data::augment(d.inputs, std::nullopt, rng);
  EXPECT_TRUE(flat.passthrough);
  EXPECT_EQ(flat.batch, d.inputs);
}

TEST(ImageIo, WellFormedTwoImageFile) {
  const auto p = temp_file("two.spds");
  data::write_image_dataset(p, tiny_images(2));
  const auto d = data::load_image_dataset(p);
  EXPECT_EQ(d.size(), 2);
  EXPECT_EQ(d.classes, 10);
  EXPECT_EQ(*d.image, (data::ImageShape{3, 4, 5}));
  EXPECT_TRUE(d.normalization.applied);
}

TEST(ImageIo, RoundTripIsBitwiseIdentical) {
  const auto p = temp_file("round.spds");
  const auto original = tiny_images(7);
  data::write_image_dataset(p, original);
  const auto back = data::load_image_dataset(p, false);
  EXPECT_EQ(back.inputs, original.inputs);
  EXPECT_EQ(back.labels, original.labels);
  const auto p2 = temp_file("round2.spds");
  data::write_image_dataset(p2, back);
  EXPECT_EQ(read_bytes(p), read_bytes(p2));
}

TEST(ImageIo, DistinctErrorKinds) {
  const auto good = temp_file("good.spds");
  data::write_image_dataset(good, tiny_images(3));
  const std::string bytes = read_bytes(good);

  const auto truncated = temp_file("truncated.spds");
  write_bytes(truncated, bytes.substr(0, bytes.size() - 10));
  EXPECT_EQ(load_error(truncated), data::DatasetErrorKind::truncated);

  const auto header = temp_file("header.spds");
  std::string bad = bytes;
  bad[1] = 'X';
  write_bytes(header, bad);
  EXPECT_EQ(load_error(header), data::DatasetErrorKind::corrupt_header);

  const auto short_header = temp_file("short_header.spds");
  write_bytes(short_header, bytes.substr(0, 10));
  EXPECT_EQ(load_error(short_header), data::DatasetErrorKind::corrupt_header);

  const auto label = temp_file("label.spds");
  std::string wrong = bytes;
  wrong[28] = static_cast<char>(200);  // first record's label byte, after the 28-byte header
  write_bytes(label, wrong);
  EXPECT_EQ(load_error(label), data::DatasetErrorKind::label_out_of_range);

  EXPECT_EQ(load_error(temp_file("does_not_exist.spds")), data::DatasetErrorKind::io);
}

TEST(ImageIo, Cifar10Batches) {
  const auto p = temp_file("data_batch_test.bin");
  std::string bytes;
  for (int i = 0; i < 3; ++i) {
    bytes.push_back(static_cast<char>(i * 3));
    for (int k = 0; k < 3072; ++k) bytes.push_back(static_cast<char>((k + i) % 256));
  }
  write_bytes(p, bytes);
  const auto d = data::load_cifar10({p, p}, false);
  EXPECT_EQ(d.size(), 6);
  EXPECT_EQ(d.classes, 10);
  EXPECT_EQ(*d.image, (data::ImageShape{3, 32, 32}));
  EXPECT_EQ(d.labels[1], 3);
  EXPECT_DOUBLE_EQ(d.inputs(5, 0), 5.0 / 255.0);

  const auto partial = temp_file("partial_batch.bin");
  write_bytes(partial, bytes.substr(0, 5000));
  try {
    data::load_cifar10({partial});
    ADD_FAILURE() << "no error raised";
  } catch (const data::DatasetError& e) {
    EXPECT_EQ(e.kind(), data::DatasetErrorKind::truncated);
  }
}

TEST(Dataset, SubsetAndValidate) {
  const auto d = tiny_images(5);
  const std::vector<Index> idx{4, 1};
  const auto s = data::subset(d, idx);
  EXPECT_EQ(s.size(), 2);
  EXPECT_EQ(s.labels, (std::vector<int>{4, 1}));
  EXPECT_EQ(s.inputs.col(0), d.inputs.col(4));
  auto broken = d;
  broken.labels[0] = 10;
  EXPECT_THROW(broken.validate(), std::invalid_argument);
}
