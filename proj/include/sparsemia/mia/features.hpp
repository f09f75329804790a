// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/dataset.hpp"
#include "sparsemia/mia/split.hpp"
#include "sparsemia/nn/network.hpp"

#include <filesystem>
#include <span>

namespace sparsemia::mia {

/// Black-box model access: inputs in, outputs out. No weights are exposed.
class Predictor {
 public:
  virtual ~Predictor() = default;
  [[nodiscard]] virtual Index input_size() const = 0;
  [[nodiscard]] virtual Index classes() const = 0;
  /// outputs (classes × batch) for inputs (input_size × batch).
  [[nodiscard]] virtual Matrix predict(const Matrix& inputs) const = 0;
};

/// Softmax probabilities of a network in evaluation mode.
class NetworkPredictor final : public Predictor {
 public:
  explicit NetworkPredictor(const nn::Network& network) : network_(network) {}
  [[nodiscard]] Index input_size() const override { return network_.input_size(); }
  [[nodiscard]] Index classes() const override { return network_.output_size(); }
  [[nodiscard]] Matrix predict(const Matrix& inputs) const override;

 private:
  const nn::Network& network_;
};

struct FeatureOptions {
  double epsilon = 0.001;
  int mc_samples = 5;

  void validate() const;
};

struct AttackFeatureVector {
  Vector class_onehot;
  Vector prediction;
  /// (1/ε)·mean_s |R(x) − R(x + ε·N_s)|, componentwise.
  Vector sensitivity;

  /// [class_onehot; prediction; sensitivity]
  [[nodiscard]] Vector flat() const;
};

/// One gaussian draw N_s per Monte-Carlo sample perturbs the whole input;
/// all outputs are read from that single perturbed evaluation.
AttackFeatureVector extract_features(const Predictor& model, const Vector& x, int label,
                                     const FeatureOptions& options, Rng& rng);

struct FeatureSet {
  Index classes = 0;
  /// 3·classes × n, columns laid out as AttackFeatureVector::flat().
  Matrix features;
  std::vector<int> member;

  [[nodiscard]] Index size() const { return features.cols(); }
};

/// Features for the listed samples. Sample `index` draws its noise from
/// derive_seed(seed, index), so results do not depend on batching or order.
FeatureSet extract_feature_set(const Predictor& model, const data::LabeledDataset& dataset,
                               std::span<const LabeledIndex> samples, const FeatureOptions& options,
                               std::uint64_t seed);

/// Columns class_0..C−1, pred_0..C−1, sens_0..C−1, member.
void write_feature_csv(const std::filesystem::path& path, const FeatureSet& set);

/// Randomly permutes the membership labels (keeps the class balance).
void shuffle_membership(FeatureSet& set, std::uint64_t seed);

}  // namespace sparsemia::mia
