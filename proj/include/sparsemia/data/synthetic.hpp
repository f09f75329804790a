// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/dataset.hpp"

#include <cstdint>
#include <string_view>

namespace sparsemia::data {

enum class SyntheticKind { blobs, spirals };

SyntheticKind parse_synthetic_kind(std::string_view name);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::spirals;
  Index samples = 4000;
  int classes = 4;
  double noise = 0.1;
  /// Total feature count. The first two features carry the class geometry;
  /// the rest are pure noise (blobs) or zero-signal noise (spirals).
  Index dims = 2;
  std::uint64_t seed = 0;
};

/// Balanced synthetic classification data (labels cycle 0..C-1), not yet
/// normalized.
///  - blobs: class c centred on the unit circle at angle 2πc/C, isotropic
///    gaussian noise of standard deviation `noise` on every feature.
///  - spirals: C interleaved arms r = t, θ = 3πt + 2πc/C for t ∈ [0.05, 1),
///    gaussian noise added to both coordinates.
LabeledDataset make_synthetic(const SyntheticSpec& spec);

}  // namespace sparsemia::data
