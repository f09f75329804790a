// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/mia/attack.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace sparsemia::mia {

AttackOutcome attack(const Discriminator& discriminator, const FeatureSet& target_features) {
  const auto members = std::count(target_features.member.begin(), target_features.member.end(), 1);
  if (target_features.size() == 0 || 2 * members != target_features.size()) {
    throw std::invalid_argument("attack: evaluation set must hold equal numbers of members and non-members");
  }
  AttackOutcome out;
  out.discriminator = discriminator.spec;
  out.precision = percent_correct(discriminator.predict(target_features.features), target_features.member);
  out.defense = defense_from_precision(out.precision);
  const Vector scores = discriminator.scores(target_features.features);
  out.scores.assign(scores.begin(), scores.end());
  out.truth = target_features.member;
  return out;
}

AttackOutcome attack(const Discriminator& discriminator, const Predictor& target_model,
                     const data::LabeledDataset& dataset, const MembershipSplit& split,
                     const FeatureOptions& features, std::uint64_t seed) {
  const auto samples = evaluation_set(split, Side::target);
  return attack(discriminator, extract_feature_set(target_model, dataset, samples, features, derive_seed(seed, 0xfea8)));
}

nlohmann::json to_json(const AttackOutcome& outcome) {
  return {
      {"precision", outcome.precision},
      {"defense", outcome.defense},
      {"discriminator",
       {{"hidden", outcome.discriminator.hidden}, {"learning_rate", outcome.discriminator.learning_rate}}},
      {"scores", outcome.scores},
      {"member", outcome.truth},
  };
}

void write_attack_json(const std::filesystem::path& path, const AttackOutcome& outcome) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(outcome).dump(2) << '\n';
}

}  // namespace sparsemia::mia
