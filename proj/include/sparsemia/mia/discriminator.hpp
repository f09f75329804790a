// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/mia/features.hpp"
#include "sparsemia/nn/network.hpp"

#include <string>
#include <vector>

namespace sparsemia::mia {

struct DiscriminatorSpec {
  std::vector<Index> hidden;
  double learning_rate = 0.001;

  [[nodiscard]] std::string describe() const;
  bool operator==(const DiscriminatorSpec&) const = default;
};

struct DiscriminatorOptions {
  std::vector<std::vector<Index>> architectures{{30}, {30, 30}, {100, 100, 100}};
  std::vector<double> learning_rates{0.01, 0.001, 0.0001};
  int epochs = 80;
  Index batch_size = 64;
  /// Share of each membership class held out for model selection.
  double holdout_fraction = 0.2;

  [[nodiscard]] std::vector<DiscriminatorSpec> grid() const;
  void validate() const;
};

/// ReLU perceptron with a 2-class softmax head over z-scored features.
struct Discriminator {
  DiscriminatorSpec spec;
  nn::Network network;
  Vector feature_mean;
  Vector feature_scale;

  /// Membership probability per column of `features`.
  [[nodiscard]] Vector scores(const Matrix& features) const;
  /// 1 where the membership probability beats the non-member probability.
  [[nodiscard]] std::vector<int> predict(const Matrix& features) const;
};

struct GridEntry {
  DiscriminatorSpec spec;
  /// Percent correct on the held-out shadow slice.
  double holdout_accuracy = 0;
};

struct DiscriminatorSelection {
  Discriminator best;
  std::vector<GridEntry> grid;
  /// Every feature vector in the training set was identical.
  bool degenerate_features = false;
};

/// Percent of `predicted` equal to `truth`.
double percent_correct(std::span<const int> predicted, std::span<const int> truth);

/// Trains one discriminator (Adam, no weight decay) on every sample of `set`.
Discriminator train_discriminator(const FeatureSet& set, const DiscriminatorSpec& spec,
                                  const DiscriminatorOptions& options, std::uint64_t seed);

/// Trains the whole grid on the shadow-side features minus a stratified
/// holdout slice and keeps the member with the best holdout accuracy
/// (earliest grid entry on ties).
DiscriminatorSelection train_discriminators(const FeatureSet& shadow_features,
                                            const DiscriminatorOptions& options, std::uint64_t seed);

/// Extracts shadow-side features from the balanced shadow evaluation set,
/// then selects as above.
DiscriminatorSelection train_discriminators(const Predictor& shadow_model, const data::LabeledDataset& dataset,
                                            const MembershipSplit& split, const FeatureOptions& features,
                                            const DiscriminatorOptions& options, std::uint64_t seed);

}  // namespace sparsemia::mia
