// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/experiment/report.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sparsemia::experiment {

struct TradeoffPoint {
  std::string level;
  double accuracy = 0;
  double defense = 0;
};

/// Levels whose mean nonzero percentage lies in [min, max]; the dense level
/// is always the reference and never part of the window.
struct SparsityWindow {
  double min_nonzero_percent = 0;
  double max_nonzero_percent = 100;
};

struct Tradeoff {
  /// Least-squares slope of defense against accuracy over the window.
  double slope = 0;
  /// Mean over window points of
  ///   (|D − D_dense| / D_dense) · (A_dense / |A − A_dense|).
  /// Empty when every point had a zero denominator.
  std::optional<double> ratio;
  std::vector<std::string> used;
  /// Points left out of the ratio because a denominator vanished.
  std::vector<std::string> excluded;
};

/// Slope of the ordinary least-squares line y = a + b·x. Throws
/// std::invalid_argument for fewer than 2 points or constant x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

Tradeoff compute_tradeoff(const TradeoffPoint& dense, std::span<const TradeoffPoint> window);

/// Window points come from the report's aggregates (means). Throws
/// std::invalid_argument when the dense level is missing or fewer than two
/// levels fall inside the window.
Tradeoff compute_tradeoff(const ExperimentReport& report, const SparsityWindow& window);

nlohmann::json to_json(const Tradeoff& tradeoff);

}  // namespace sparsemia::experiment
