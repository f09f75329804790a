// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/mia/features.hpp"

#include "sparsemia/nn/loss.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <stdexcept>

namespace sparsemia::mia {

Matrix NetworkPredictor::predict(const Matrix& inputs) const { return nn::softmax(network_.infer(inputs)); }

void FeatureOptions::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("features: epsilon must be positive");
  if (mc_samples < 1) throw std::invalid_argument("features: need at least one Monte-Carlo sample");
}

Vector AttackFeatureVector::flat() const {
  Vector out(class_onehot.size() + prediction.size() + sensitivity.size());
  out << class_onehot, prediction, sensitivity;
  return out;
}

namespace {

/// Input columns for one sample: x followed by mc_samples perturbed copies.
Matrix perturbed_batch(const Vector& x, const FeatureOptions& options, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix batch(x.size(), 1 + options.mc_samples);
  batch.col(0) = x;
  for (int s = 1; s <= options.mc_samples; ++s) {
    for (Index i = 0; i < x.size(); ++i) batch(i, s) = x[i] + options.epsilon * gauss(rng);
  }
  return batch;
}

AttackFeatureVector features_from_outputs(const Eigen::Ref<const Matrix>& outputs, int label, Index classes,
                                          const FeatureOptions& options) {
  if (label < 0 || label >= classes) throw std::out_of_range("features: label outside [0, classes)");
  AttackFeatureVector f;
  f.class_onehot = Vector::Zero(classes);
  f.class_onehot[label] = 1.0;
  f.prediction = outputs.col(0);
  f.sensitivity = Vector::Zero(outputs.rows());
  for (int s = 1; s <= options.mc_samples; ++s) f.sensitivity += (outputs.col(0) - outputs.col(s)).cwiseAbs();
  f.sensitivity /= options.epsilon * options.mc_samples;
  return f;
}

}  // namespace

AttackFeatureVector extract_features(const Predictor& model, const Vector& x, int label,
                                     const FeatureOptions& options, Rng& rng) {
  options.validate();
  const Matrix outputs = model.predict(perturbed_batch(x, options, rng));
  return features_from_outputs(outputs, label, model.classes(), options);
}

FeatureSet extract_feature_set(const Predictor& model, const data::LabeledDataset& dataset,
                               std::span<const LabeledIndex> samples, const FeatureOptions& options,
                               std::uint64_t seed) {
  options.validate();
  const Index classes = model.classes();
  const Index per_sample = 1 + options.mc_samples;
  const Index chunk = std::max<Index>(1, 1024 / per_sample);
  FeatureSet set;
  set.classes = classes;
  set.features.resize(3 * classes, static_cast<Index>(samples.size()));
  set.member.reserve(samples.size());

  for (std::size_t begin = 0; begin < samples.size(); begin += static_cast<std::size_t>(chunk)) {
    const std::size_t end = std::min(samples.size(), begin + static_cast<std::size_t>(chunk));
    Matrix batch(dataset.feature_size(), static_cast<Index>(end - begin) * per_sample);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(samples[i].index)));
      batch.middleCols(static_cast<Index>(i - begin) * per_sample, per_sample) =
          perturbed_batch(dataset.inputs.col(samples[i].index), options, rng);
    }
    const Matrix outputs = model.predict(batch);
    for (std::size_t i = begin; i < end; ++i) {
      const auto label = dataset.labels[static_cast<std::size_t>(samples[i].index)];
      const auto f = features_from_outputs(outputs.middleCols(static_cast<Index>(i - begin) * per_sample, per_sample),
                                           label, classes, options);
      set.features.col(static_cast<Index>(i)) = f.flat();
      set.member.push_back(samples[i].member);
    }
  }
  return set;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureSet& set) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const char* prefix : {"class_", "pred_", "sens_"}) {
    for (Index c = 0; c < set.classes; ++c) out << prefix << c << ',';
  }
  out << "member\n" << std::setprecision(17);
  for (Index j = 0; j < set.size(); ++j) {
    for (Index r = 0; r < set.features.rows(); ++r) out << set.features(r, j) << ',';
    out << set.member[static_cast<std::size_t>(j)] << '\n';
  }
}

void shuffle_membership(FeatureSet& set, std::uint64_t seed) {
  Rng rng(seed);
  std::shuffle(set.member.begin(), set.member.end(), rng);
}

}  // namespace sparsemia::mia
