// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/types.hpp"

#include <cstdint>
#include <vector>

namespace sparsemia::mia {

enum class Side { target, shadow };

/// Smallest dataset partition() accepts (after truncation to a multiple of 4).
inline constexpr Index kMinPartitionSize = 8;

/// Four disjoint, equally sized quarters of a dataset. Each train quarter
/// holds a validation subset that the model never fits.
struct MembershipSplit {
  std::vector<Index> target_train;
  std::vector<Index> target_test;
  std::vector<Index> shadow_train;
  std::vector<Index> shadow_test;
  std::vector<Index> target_val;
  std::vector<Index> shadow_val;

  [[nodiscard]] const std::vector<Index>& train(Side side) const;
  [[nodiscard]] const std::vector<Index>& test(Side side) const;
  [[nodiscard]] const std::vector<Index>& validation(Side side) const;
  /// train(side) minus validation(side): the samples the model is fit on.
  [[nodiscard]] std::vector<Index> fitted(Side side) const;
};

/// Validation subset size for a quarter of `quarter` samples: ⌈quarter/15⌉.
Index validation_size(Index quarter);

/// Uniform random partition of [0, size) into four quarters. `size` is
/// truncated to the largest multiple of 4; the dropped indices are the ones
/// left over after shuffling. Throws std::invalid_argument when fewer than
/// kMinPartitionSize indices remain.
MembershipSplit partition(Index size, std::uint64_t master_seed);

/// 1 for members of the side's train quarter, 0 for its test quarter.
/// Throws std::domain_error for any other index.
int membership_label(Index index, const MembershipSplit& split, Side side);

struct LabeledIndex {
  Index index = 0;
  int member = 0;
};

/// Balanced evaluation set for a side: every fitted sample as a member, and
/// the same number of test-quarter samples (in split order) as non-members.
std::vector<LabeledIndex> evaluation_set(const MembershipSplit& split, Side side);

}  // namespace sparsemia::mia
