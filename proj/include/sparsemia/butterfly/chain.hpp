// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/butterfly/support.hpp"

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sparsemia::butterfly {

/// One factor of a generalized butterfly chain, with support
/// I_outer ⊗ 1_{block_rows × block_cols} ⊗ I_inner.
struct FactorSpec {
  Index outer = 1;
  Index block_rows = 1;
  Index block_cols = 1;
  Index inner = 1;

  [[nodiscard]] Index rows() const noexcept { return outer * block_rows * inner; }
  [[nodiscard]] Index cols() const noexcept { return outer * block_cols * inner; }
  [[nodiscard]] Index nnz() const noexcept { return outer * block_rows * block_cols * inner; }
  [[nodiscard]] SupportPattern support() const {
    return generalized_support(outer, block_rows, block_cols, inner);
  }

  friend auto operator<=>(const FactorSpec&, const FactorSpec&) = default;
};

/// Ordered factor shapes X^(1) ... X^(L) of an m×n matrix (X^(1) leftmost).
///
/// The constructor enforces adjacency (cols of factor k = rows of factor k+1)
/// and monotone intermediate sizes: the sequence rows(X^(1)), ...,
/// rows(X^(L)), cols(X^(L)) is non-increasing when m ≥ n and non-decreasing
/// otherwise.
class ButterflyChain {
 public:
  ButterflyChain() = default;
  explicit ButterflyChain(std::vector<FactorSpec> factors);

  [[nodiscard]] Index rows() const noexcept { return factors_.empty() ? 0 : factors_.front().rows(); }
  [[nodiscard]] Index cols() const noexcept { return factors_.empty() ? 0 : factors_.back().cols(); }
  [[nodiscard]] std::size_t size() const noexcept { return factors_.size(); }
  [[nodiscard]] bool empty() const noexcept { return factors_.empty(); }
  [[nodiscard]] const FactorSpec& operator[](std::size_t k) const { return factors_[k]; }
  [[nodiscard]] const std::vector<FactorSpec>& factors() const noexcept { return factors_; }
  [[nodiscard]] auto begin() const noexcept { return factors_.begin(); }
  [[nodiscard]] auto end() const noexcept { return factors_.end(); }

  /// Total number of support entries over all factors.
  [[nodiscard]] Index param_count() const noexcept;

  /// True when consecutive factors compose into a single Kronecker pattern
  /// (outer_{k+1} = outer_k·block_cols_k, inner_k = block_rows_{k+1}·inner_{k+1})
  /// and the product support is fully dense (outer_1 = inner_L = 1).
  [[nodiscard]] bool is_chainable() const noexcept;

  friend auto operator<=>(const ButterflyChain&, const ButterflyChain&) = default;
  friend bool operator==(const ButterflyChain&, const ButterflyChain&) = default;

 private:
  std::vector<FactorSpec> factors_;
};

/// The canonical square chain of depth L for N = 2^L: factor k is S_bf^(k).
ButterflyChain square_butterfly_chain(int depth);

/// Default number of candidate (row-split, col-split) pairs examined.
inline constexpr std::size_t kDefaultChainBudget = std::size_t{1} << 21;

struct ChainEnumeration {
  std::vector<ButterflyChain> chains;
  bool truncated = false;
};

/// All chainable monotone chains of `depth` factors for an m×n matrix in which
/// every factor mixes at least 2×2 blocks. The row count m is split as the
/// ordered product of block_rows and n as that of block_cols; candidates are
/// visited in lexicographic order of the two splits. At most `budget`
/// candidates are examined; `truncated` reports whether that cap was hit.
ChainEnumeration enumerate_monotone_chains(Index m, Index n, int depth,
                                           std::size_t budget = kDefaultChainBudget);

class NoChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chain with the fewest parameters; ties go to the lexicographically smallest
/// factor list. Throws NoChainError when no chain exists.
ButterflyChain select_min_param_chain(Index m, Index n, int depth,
                                      std::size_t budget = kDefaultChainBudget);

}  // namespace sparsemia::butterfly
