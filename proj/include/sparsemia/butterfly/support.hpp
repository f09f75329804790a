// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace sparsemia::butterfly {

using Index = Eigen::Index;

/// Set of nonzero positions of a sparse matrix. Entries are kept sorted in
/// row-major order, which is also the canonical order for factor values.
struct SupportPattern {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::pair<Index, Index>> entries;

  [[nodiscard]] Index nnz() const noexcept { return static_cast<Index>(entries.size()); }
  [[nodiscard]] bool contains(Index row, Index col) const;
  /// 0/1 indicator matrix of the support.
  [[nodiscard]] Eigen::MatrixXi indicator() const;

  friend bool operator==(const SupportPattern&, const SupportPattern&) = default;
};

/// Support of I_outer ⊗ 1_{block_rows × block_cols} ⊗ I_inner.
/// Throws std::domain_error on a non-positive dimension.
SupportPattern generalized_support(Index outer, Index block_rows, Index block_cols, Index inner);

/// Square butterfly support at `level` (1-based) for N = 2^depth:
/// I_{2^(level-1)} ⊗ [[1,1],[1,1]] ⊗ I_{N / 2^level}.
SupportPattern butterfly_support(int level, int depth);

/// Boolean product of two supports, as a 0/1 indicator matrix.
Eigen::MatrixXi support_product(const Eigen::MatrixXi& lhs, const Eigen::MatrixXi& rhs);

}  // namespace sparsemia::butterfly
