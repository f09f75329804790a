// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/butterfly/support.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sparsemia::butterfly {

bool SupportPattern::contains(Index row, Index col) const {
  return std::binary_search(entries.begin(), entries.end(), std::pair{row, col});
}

Eigen::MatrixXi SupportPattern::indicator() const {
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(rows, cols);
  for (const auto& [r, c] : entries) m(r, c) = 1;
  return m;
}

SupportPattern generalized_support(Index outer, Index block_rows, Index block_cols, Index inner) {
  if (outer < 1 || block_rows < 1 || block_cols < 1 || inner < 1) {
    throw std::domain_error("generalized_support: dimensions must be positive");
  }
  SupportPattern s;
  s.rows = outer * block_rows * inner;
  s.cols = outer * block_cols * inner;
  s.entries.reserve(static_cast<std::size_t>(outer * block_rows * block_cols * inner));
  // Row i = (o, br, k) maps to columns (o, bc, k) for every bc; iterating in
  // this nesting order yields row-major order directly.
  for (Index o = 0; o < outer; ++o) {
    for (Index br = 0; br < block_rows; ++br) {
      for (Index k = 0; k < inner; ++k) {
        const Index row = (o * block_rows + br) * inner + k;
        for (Index bc = 0; bc < block_cols; ++bc) {
          s.entries.emplace_back(row, (o * block_cols + bc) * inner + k);
        }
      }
    }
  }
  return s;
}

SupportPattern butterfly_support(int level, int depth) {
  if (depth < 1 || depth > 30 || level < 1 || level > depth) {
    throw std::domain_error("butterfly_support: level " + std::to_string(level) +
                            " outside [1, " + std::to_string(depth) + "]");
  }
  const Index n = Index{1} << depth;
  return generalized_support(Index{1} << (level - 1), 2, 2, n >> level);
}

Eigen::MatrixXi support_product(const Eigen::MatrixXi& lhs, const Eigen::MatrixXi& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw std::domain_error("support_product: inner dimensions differ");
  }
  Eigen::MatrixXi out = Eigen::MatrixXi::Zero(lhs.rows(), rhs.cols());
  for (Index i = 0; i < lhs.rows(); ++i) {
    for (Index k = 0; k < lhs.cols(); ++k) {
      if (lhs(i, k) == 0) continue;
      for (Index j = 0; j < rhs.cols(); ++j) {
        if (rhs(k, j) != 0) out(i, j) = 1;
      }
    }
  }
  return out;
}

}  // namespace sparsemia::butterfly
