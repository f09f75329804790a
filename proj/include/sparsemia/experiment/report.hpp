// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sparsemia::experiment {

/// Name of the level every other level is compared against.
inline constexpr const char* kDenseLevel = "dense";

/// Outcome of one seed at one sparsity level.
struct SeedRecord {
  std::string level;
  std::uint64_t seed = 0;
  /// Nonzero trainable parameters, percent of the dense architecture.
  double nonzero_percent = 0;
  double test_accuracy = 0;
  double train_accuracy = 0;
  double precision = 0;
  double defense = 0;
  std::string discriminator;
  bool degenerate_features = false;

  bool operator==(const SeedRecord&) const = default;
};

struct Diagnostic {
  std::uint64_t seed = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

/// Mean and sample standard deviation (0 for a single value).
struct Summary {
  double mean = 0;
  double std = 0;

  bool operator==(const Summary&) const = default;
};

Summary summarize(std::span<const double> values);

struct LevelAggregate {
  std::string level;
  std::size_t count = 0;
  Summary nonzero_percent;
  Summary test_accuracy;
  Summary train_accuracy;
  Summary precision;
  Summary defense;
  /// mean ± std of the defense is disjoint from the dense level's interval.
  bool significant = false;

  bool operator==(const LevelAggregate&) const = default;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::uint64_t> seeds;
  std::vector<SeedRecord> records;
  std::vector<Diagnostic> diagnostics;
  std::vector<LevelAggregate> aggregates;

  bool operator==(const ExperimentReport&) const = default;
};

/// Per-level aggregates, levels in order of first appearance.
std::vector<LevelAggregate> aggregate(std::span<const SeedRecord> records);

/// Interval test used for the significance flag.
bool intervals_disjoint(const Summary& a, const Summary& b);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant. Throws std::invalid_argument on size mismatch
/// or fewer than 2 values.
double spearman(std::span<const double> x, std::span<const double> y);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& json);

void save_report(const std::filesystem::path& path, const ExperimentReport& report);
ExperimentReport load_report(const std::filesystem::path& path);

/// One row per seed record.
void write_records_csv(const std::filesystem::path& path, const ExperimentReport& report);

}  // namespace sparsemia::experiment
