// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/synthetic.hpp"
#include "sparsemia/imp/imp.hpp"
#include "sparsemia/mia/discriminator.hpp"
#include "sparsemia/nn/optim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sparsemia::experiment {

enum class DatasetSource { synthetic, image_file, cifar10 };

struct DatasetConfig {
  DatasetSource source = DatasetSource::synthetic;
  data::SyntheticSpec synthetic;
  /// Image container for image_file; batch files for cifar10.
  std::vector<std::filesystem::path> paths;
  /// Keep only the first `limit` samples when positive.
  Index limit = 0;
};

enum class Architecture { mlp, cnn };
enum class Variant { dense, butterfly, imp };

std::string to_string(Variant variant);

/// mlp: input → width, then `segments` width×width hidden layers, then the
///      classifier; every hidden layer is followed by ReLU.
/// cnn: 3×3 stem conv to `width` channels, then `segments` 3×3 conv+BN+ReLU
///      blocks, global average pooling and the classifier.
/// The butterfly variant factorizes the last `butterfly_segments` segment
/// layers with chains of `butterfly_depth` factors.
struct ModelConfig {
  Architecture arch = Architecture::mlp;
  Index width = 64;
  int segments = 3;
  Variant variant = Variant::dense;
  int butterfly_segments = 1;
  int butterfly_depth = 2;

  void validate() const;
};

enum class Release { final_weights, best_validation };

struct MiaConfig {
  mia::FeatureOptions features;
  mia::DiscriminatorOptions discriminator;
  /// Train discriminators on randomly permuted membership labels, the
  /// no-signal baseline.
  bool shuffle_labels = false;
};

/// One (S, L) butterfly level in a sweep.
struct ButterflyLevel {
  int segments = 1;
  int depth = 2;
  bool operator==(const ButterflyLevel&) const = default;
};

struct SweepConfig {
  bool dense = true;
  std::vector<int> imp_rounds{1, 3, 5, 8};
  std::vector<ButterflyLevel> butterfly{{1, 2}, {2, 2}, {3, 2}};
};

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetConfig dataset;
  ModelConfig model;
  nn::TrainConfig train;
  imp::ImpSchedule imp{.rounds = 8};
  /// Which weights of a trained model are attacked and evaluated.
  Release release = Release::final_weights;
  MiaConfig mia;
  SweepConfig sweep;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::filesystem::path output = "out";

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Parses the INI-style configuration (see README for the keys). Unknown
/// keys are rejected so typos do not silently fall back to defaults.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sparsemia::experiment
