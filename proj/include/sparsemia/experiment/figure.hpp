// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/experiment/report.hpp"

#include <filesystem>
#include <string>

namespace sparsemia::experiment {

/// SVG scatter of mean defense against mean test accuracy, one
/// `circle.marker` per level with ±std error bars on both axes, each
/// annotated with its nonzero-weight percentage. A least-squares line
/// (`line.fit`) is drawn when at least two levels differ in accuracy.
std::string render_figure(const ExperimentReport& report);

/// Throws std::invalid_argument for a report without aggregates (no file is
/// created) and std::runtime_error when the file cannot be written.
void emit_figure(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace sparsemia::experiment
