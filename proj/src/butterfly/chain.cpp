// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/butterfly/chain.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace sparsemia::butterfly {

namespace {

bool monotone(const std::vector<Index>& sizes) {
  const bool shrinking = sizes.front() >= sizes.back();
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    if (shrinking ? sizes[k + 1] > sizes[k] : sizes[k + 1] < sizes[k]) return false;
  }
  return true;
}

// Ordered factorizations of `value` into `parts` factors, each ≥ 2, in
// lexicographic order.
void ordered_splits(Index value, int parts, std::vector<Index>& prefix,
                    std::vector<std::vector<Index>>& out) {
  if (parts == 1) {
    if (value >= 2) {
      prefix.push_back(value);
      out.push_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  for (Index d = 2; d * 2 <= value; ++d) {
    if (value % d != 0) continue;
    prefix.push_back(d);
    ordered_splits(value / d, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<Index>> ordered_splits(Index value, int parts) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> prefix;
  ordered_splits(value, parts, prefix, out);
  return out;
}

}  // namespace

ButterflyChain::ButterflyChain(std::vector<FactorSpec> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("ButterflyChain: no factors");
  std::vector<Index> sizes;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const auto& f = factors_[k];
    if (f.outer < 1 || f.block_rows < 1 || f.block_cols < 1 || f.inner < 1) {
      throw std::domain_error("ButterflyChain: factor dimensions must be positive");
    }
    if (k + 1 < factors_.size() && f.cols() != factors_[k + 1].rows()) {
      throw std::invalid_argument("ButterflyChain: factor " + std::to_string(k) +
                                  " does not match the next factor's shape");
    }
    sizes.push_back(f.rows());
  }
  sizes.push_back(factors_.back().cols());
  if (!monotone(sizes)) throw std::invalid_argument("ButterflyChain: sizes are not monotone");
}

Index ButterflyChain::param_count() const noexcept {
  Index total = 0;
  for (const auto& f : factors_) total += f.nnz();
  return total;
}

bool ButterflyChain::is_chainable() const noexcept {
  if (factors_.empty()) return false;
  if (factors_.front().outer != 1 || factors_.back().inner != 1) return false;
  for (std::size_t k = 0; k + 1 < factors_.size(); ++k) {
    const auto& a = factors_[k];
    const auto& b = factors_[k + 1];
    if (b.outer != a.outer * a.block_cols || a.inner != b.block_rows * b.inner) return false;
  }
  return true;
}

ButterflyChain square_butterfly_chain(int depth) {
  if (depth < 1 || depth > 30) throw std::domain_error("square_butterfly_chain: bad depth");
  const Index n = Index{1} << depth;
  std::vector<FactorSpec> factors;
  for (int level = 1; level <= depth; ++level) {
    factors.push_back({Index{1} << (level - 1), 2, 2, n >> level});
  }
  return ButterflyChain(std::move(factors));
}

ChainEnumeration enumerate_monotone_chains(Index m, Index n, int depth, std::size_t budget) {
  if (m < 1 || n < 1 || depth < 1) {
    throw std::domain_error("enumerate_monotone_chains: dimensions and depth must be positive");
  }
  ChainEnumeration result;
  const auto row_splits = ordered_splits(m, depth);
  const auto col_splits = ordered_splits(n, depth);
  const bool shrinking = m >= n;
  std::size_t examined = 0;
  for (const auto& br : row_splits) {
    for (const auto& bc : col_splits) {
      if (examined++ == budget) {
        result.truncated = true;
        return result;
      }
      // Intermediate size k is (prod of bc before k)·(prod of br from k on);
      // each step multiplies it by bc_k / br_k.
      bool ok = true;
      for (int k = 0; k < depth && ok; ++k) {
        ok = shrinking ? bc[k] <= br[k] : bc[k] >= br[k];
      }
      if (!ok) continue;
      std::vector<FactorSpec> factors(static_cast<std::size_t>(depth));
      Index outer = 1;
      for (int k = 0; k < depth; ++k) {
        Index inner = 1;
        for (int j = k + 1; j < depth; ++j) inner *= br[j];
        factors[k] = {outer, br[k], bc[k], inner};
        outer *= bc[k];
      }
      result.chains.emplace_back(std::move(factors));
    }
  }
  return result;
}

ButterflyChain select_min_param_chain(Index m, Index n, int depth, std::size_t budget) {
  const auto found = enumerate_monotone_chains(m, n, depth, budget);
  if (found.chains.empty()) {
    throw NoChainError("no butterfly chain of depth " + std::to_string(depth) + " for a " +
                       std::to_string(m) + "x" + std::to_string(n) + " matrix");
  }
  const auto best = std::min_element(
      found.chains.begin(), found.chains.end(), [](const auto& a, const auto& b) {
        const auto pa = a.param_count();
        const auto pb = b.param_count();
        return pa != pb ? pa < pb : a.factors() < b.factors();
      });
  return *best;
}

}  // namespace sparsemia::butterfly
