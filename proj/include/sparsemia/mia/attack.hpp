// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/mia/discriminator.hpp"

#include <json.hpp>

#include <filesystem>

namespace sparsemia::mia {

/// D = 200 − 2P for an attack precision P in percent.
constexpr double defense_from_precision(double precision) { return 200.0 - 2.0 * precision; }

struct AttackOutcome {
  /// Percent of correct membership predictions.
  double precision = 0;
  double defense = 0;
  DiscriminatorSpec discriminator;
  /// Membership probability per evaluated sample.
  std::vector<double> scores;
  std::vector<int> truth;
};

/// Throws std::invalid_argument unless the set holds as many members as
/// non-members.
AttackOutcome attack(const Discriminator& discriminator, const FeatureSet& target_features);

/// Features for the balanced target evaluation set, then attack as above.
AttackOutcome attack(const Discriminator& discriminator, const Predictor& target_model,
                     const data::LabeledDataset& dataset, const MembershipSplit& split,
                     const FeatureOptions& features, std::uint64_t seed);

nlohmann::json to_json(const AttackOutcome& outcome);
void write_attack_json(const std::filesystem::path& path, const AttackOutcome& outcome);

}  // namespace sparsemia::mia
