// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/experiment/config.hpp"
#include "sparsemia/experiment/report.hpp"
#include "sparsemia/mia/split.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>

namespace sparsemia::experiment {

/// Loads or generates the dataset, applies the sample limit and normalizes.
data::LabeledDataset prepare_dataset(const DatasetConfig& config);

struct SideData {
  data::LabeledDataset train;
  data::LabeledDataset validation;
  data::LabeledDataset test;
};

/// Fitted, validation and test subsets of one side of the split.
SideData side_data(const data::LabeledDataset& dataset, const mia::MembershipSplit& split, mia::Side side);

/// One point of a sweep.
struct Level {
  Variant variant = Variant::dense;
  int imp_rounds = 0;
  ButterflyLevel butterfly;

  /// "dense", "imp-<k>" or "butterfly-S<s>-L<l>".
  [[nodiscard]] std::string name() const;
};

/// The single level described by config.model (imp uses config.imp.rounds).
Level configured_level(const ExperimentConfig& config);
/// Dense, then IMP rounds, then butterfly levels, as enabled in config.sweep.
std::vector<Level> sweep_levels(const ExperimentConfig& config);

/// Freshly initialized network for one side of one seed. Target and shadow
/// draw from different streams but follow the same procedure.
nn::Network initialized_network(const ExperimentConfig& config, const Level& level,
                                const data::LabeledDataset& dataset, std::uint64_t seed, mia::Side side);
/// config.train with the seed used for one side of one seed.
nn::TrainConfig side_train_config(const ExperimentConfig& config, std::uint64_t seed, mia::Side side);

struct RunOptions {
  /// Progress messages; nothing is logged when empty.
  std::function<void(const std::string&)> log;
  /// When set, per-seed attack outcomes and feature tables are written here.
  std::optional<std::filesystem::path> artifacts;
};

/// For every seed: partition, train target and shadow identically for each
/// level, select a discriminator on the shadow side and attack the target.
/// A failing seed is recorded as a diagnostic and the remaining seeds run.
/// IMP levels share one pruning run per side, whose round 0 doubles as the
/// dense level.
ExperimentReport run_levels(const ExperimentConfig& config, std::span<const Level> levels,
                            const RunOptions& options = {});

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentReport run_sweep(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace sparsemia::experiment
