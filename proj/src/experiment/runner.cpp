// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/experiment/runner.hpp"

#include "sparsemia/data/image_io.hpp"
#include "sparsemia/experiment/models.hpp"
#include "sparsemia/imp/imp.hpp"
#include "sparsemia/mia/attack.hpp"
#include "sparsemia/nn/loss.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace sparsemia::experiment {

data::LabeledDataset prepare_dataset(const DatasetConfig& config) {
  data::LabeledDataset dataset;
  switch (config.source) {
    case DatasetSource::synthetic: dataset = data::make_synthetic(config.synthetic); break;
    case DatasetSource::image_file: dataset = data::load_image_dataset(config.paths.at(0), false); break;
    case DatasetSource::cifar10: dataset = data::load_cifar10(config.paths, false); break;
  }
  if (config.limit > 0 && config.limit < dataset.size()) {
    std::vector<Index> keep(static_cast<std::size_t>(config.limit));
    std::iota(keep.begin(), keep.end(), Index{0});
    dataset = data::subset(dataset, keep);
  }
  data::normalize(dataset);
  return dataset;
}

SideData side_data(const data::LabeledDataset& dataset, const mia::MembershipSplit& split, mia::Side side) {
  const auto fitted = split.fitted(side);
  return {data::subset(dataset, fitted), data::subset(dataset, split.validation(side)),
          data::subset(dataset, split.test(side))};
}

std::string Level::name() const {
  switch (variant) {
    case Variant::dense: return kDenseLevel;
    case Variant::imp: return "imp-" + std::to_string(imp_rounds);
    case Variant::butterfly:
      return "butterfly-S" + std::to_string(butterfly.segments) + "-L" + std::to_string(butterfly.depth);
  }
  return "unknown";
}

Level configured_level(const ExperimentConfig& config) {
  Level level{config.model.variant, 0, {config.model.butterfly_segments, config.model.butterfly_depth}};
  if (level.variant == Variant::imp) level.imp_rounds = config.imp.rounds;
  return level;
}

std::vector<Level> sweep_levels(const ExperimentConfig& config) {
  std::vector<Level> levels;
  if (config.sweep.dense) levels.push_back({Variant::dense, 0, {}});
  for (int r : config.sweep.imp_rounds) levels.push_back({Variant::imp, r, {}});
  for (const auto& b : config.sweep.butterfly) levels.push_back({Variant::butterfly, 0, b});
  return levels;
}

namespace {

std::uint64_t side_tag(mia::Side side) { return side == mia::Side::target ? 10 : 20; }

ModelConfig model_for(const ExperimentConfig& config, const Level& level) {
  ModelConfig m = config.model;
  m.variant = level.variant == Variant::butterfly ? Variant::butterfly : Variant::dense;
  m.butterfly_segments = level.butterfly.segments;
  m.butterfly_depth = level.butterfly.depth;
  return m;
}

struct TrainedPair {
  nn::Network target;
  nn::Network shadow;
};

nn::Network released(const ExperimentConfig& config, const nn::TrainedModel& model) {
  return config.release == Release::final_weights ? model.network : model.best_network();
}

}  // namespace

nn::Network initialized_network(const ExperimentConfig& config, const Level& level,
                                const data::LabeledDataset& dataset, std::uint64_t seed, mia::Side side) {
  auto net = build_network(model_for(config, level), dataset);
  Rng rng(derive_seed(seed, side_tag(side)));
  net.initialize(rng);
  return net;
}

nn::TrainConfig side_train_config(const ExperimentConfig& config, std::uint64_t seed, mia::Side side) {
  nn::TrainConfig c = config.train;
  c.seed = derive_seed(seed, side_tag(side) + 1);
  return c;
}

namespace {

/// Trained (target, shadow) per level name for one seed.
std::map<std::string, TrainedPair> train_levels(const ExperimentConfig& config, std::span<const Level> levels,
                                                const data::LabeledDataset& dataset,
                                                const mia::MembershipSplit& split, std::uint64_t seed,
                                                const RunOptions& options) {
  std::map<std::string, TrainedPair> out;
  const auto log = [&](const std::string& msg) {
    if (options.log) options.log("seed " + std::to_string(seed) + ": " + msg);
  };
  const SideData sides[2] = {side_data(dataset, split, mia::Side::target),
                             side_data(dataset, split, mia::Side::shadow)};
  const mia::Side side_ids[2] = {mia::Side::target, mia::Side::shadow};

  int max_rounds = 0;
  for (const auto& l : levels) {
    if (l.variant == Variant::imp) max_rounds = std::max(max_rounds, l.imp_rounds);
  }
  const bool dense_wanted = std::any_of(levels.begin(), levels.end(), [](const Level& l) {
    return l.variant == Variant::dense;
  });

  if (max_rounds > 0) {
    imp::ImpSchedule schedule = config.imp;
    schedule.rounds = max_rounds;
    std::vector<std::vector<imp::ImpRound>> runs;
    for (int s = 0; s < 2; ++s) {
      log(std::string("IMP on ") + (s == 0 ? "target" : "shadow") + " (" + std::to_string(max_rounds) + " rounds)");
      const Level dense{};
      runs.push_back(imp::imp_run(initialized_network(config, dense, dataset, seed, side_ids[s]), sides[s].train,
                                  sides[s].validation, side_train_config(config, seed, side_ids[s]), schedule));
    }
    for (const auto& l : levels) {
      if (l.variant == Variant::imp || (l.variant == Variant::dense && dense_wanted)) {
        const auto k = static_cast<std::size_t>(l.imp_rounds);
        out[l.name()] = {released(config, runs[0][k].model), released(config, runs[1][k].model)};
      }
    }
  }
  for (const auto& l : levels) {
    if (out.contains(l.name())) continue;
    TrainedPair pair;
    for (int s = 0; s < 2; ++s) {
      log("training " + l.name() + (s == 0 ? " target" : " shadow"));
      auto cfg = side_train_config(config, seed, side_ids[s]);
      // Same stream as round 0 of an IMP run so dense levels agree across modes.
      cfg.seed = derive_seed(cfg.seed, 0);
      auto model = nn::train(initialized_network(config, l, dataset, seed, side_ids[s]), sides[s].train,
                             sides[s].validation, cfg);
      (s == 0 ? pair.target : pair.shadow) = released(config, model);
    }
    out[l.name()] = std::move(pair);
  }
  return out;
}

SeedRecord evaluate_level(const ExperimentConfig& config, const std::string& level, const TrainedPair& pair,
                          const data::LabeledDataset& dataset, const mia::MembershipSplit& split,
                          std::uint64_t seed, Index dense_count, const RunOptions& options) {
  const mia::NetworkPredictor shadow(pair.shadow);
  const mia::NetworkPredictor target(pair.target);
  const auto& features = config.mia.features;

  auto shadow_set = mia::extract_feature_set(shadow, dataset, mia::evaluation_set(split, mia::Side::shadow),
                                             features, derive_seed(seed, 30));
  if (config.mia.shuffle_labels) mia::shuffle_membership(shadow_set, derive_seed(seed, 31));
  const auto selection = mia::train_discriminators(shadow_set, config.mia.discriminator, derive_seed(seed, 40));
  const auto target_set = mia::extract_feature_set(target, dataset, mia::evaluation_set(split, mia::Side::target),
                                                   features, derive_seed(seed, 50));
  const auto outcome = mia::attack(selection.best, target_set);

  if (options.artifacts) {
    const auto dir = *options.artifacts;
    std::filesystem::create_directories(dir);
    const std::string stem = level + "_seed" + std::to_string(seed);
    mia::write_attack_json(dir / ("attack_" + stem + ".json"), outcome);
    mia::write_feature_csv(dir / ("features_shadow_" + stem + ".csv"), shadow_set);
    mia::write_feature_csv(dir / ("features_target_" + stem + ".csv"), target_set);
  }

  SeedRecord r;
  r.level = level;
  r.seed = seed;
  r.nonzero_percent = 100.0 * static_cast<double>(nn::count_params(pair.target).nonzero) /
                      static_cast<double>(dense_count);
  r.test_accuracy = nn::accuracy(pair.target, data::subset(dataset, split.target_test));
  r.train_accuracy = nn::accuracy(pair.target, data::subset(dataset, split.fitted(mia::Side::target)));
  r.precision = outcome.precision;
  r.defense = outcome.defense;
  r.discriminator = outcome.discriminator.describe();
  r.degenerate_features = selection.degenerate_features;
  return r;
}

}  // namespace

ExperimentReport run_levels(const ExperimentConfig& config, std::span<const Level> levels,
                            const RunOptions& options) {
  config.validate();
  if (levels.empty()) throw std::invalid_argument("run: no levels to evaluate");
  ExperimentReport report;
  report.name = config.name;
  report.seeds = config.seeds;
  const auto dataset = prepare_dataset(config.dataset);
  const Index dense_count = dense_parameter_count(config.model, dataset);

  for (std::uint64_t seed : config.seeds) {
    try {
      const auto split = mia::partition(dataset.size(), seed);
      const auto trained = train_levels(config, levels, dataset, split, seed, options);
      std::vector<SeedRecord> records;
      for (const auto& l : levels) {
        if (options.log) options.log("seed " + std::to_string(seed) + ": attacking " + l.name());
        records.push_back(evaluate_level(config, l.name(), trained.at(l.name()), dataset, split, seed,
                                         dense_count, options));
      }
      report.records.insert(report.records.end(), records.begin(), records.end());
    } catch (const std::exception& e) {
      report.diagnostics.push_back({seed, e.what()});
      if (options.log) options.log("seed " + std::to_string(seed) + " failed: " + e.what());
    }
  }
  report.aggregates = aggregate(report.records);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const Level level = configured_level(config);
  return run_levels(config, std::span(&level, 1), options);
}

ExperimentReport run_sweep(const ExperimentConfig& config, const RunOptions& options) {
  const auto levels = sweep_levels(config);
  return run_levels(config, levels, options);
}

}  // namespace sparsemia::experiment
