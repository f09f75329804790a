// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/butterfly/chain.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsemia::butterfly {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Multiplies plus adds performed by the factorized kernels.
struct OpCount {
  std::uint64_t operations = 0;
};

/// W = X^(1) ... X^(L), storing only the support entries of each factor.
/// values(k) holds X^(k+1)'s entries in row-major support order, so entry
/// (i, j) of a factor with block_cols s sits at index i·s + (position of j
/// among row i's columns).
template <typename Scalar = double>
class FactorizedMatrix {
 public:
  using Vector = VectorX<Scalar>;

  FactorizedMatrix() = default;

  explicit FactorizedMatrix(ButterflyChain chain) : chain_(std::move(chain)) {
    for (const auto& f : chain_) values_.push_back(Vector::Zero(f.nnz()));
  }

  FactorizedMatrix(ButterflyChain chain, std::vector<Vector> values)
      : chain_(std::move(chain)), values_(std::move(values)) {
    if (values_.size() != chain_.size()) {
      throw std::invalid_argument("FactorizedMatrix: one value vector per factor required");
    }
    for (std::size_t k = 0; k < chain_.size(); ++k) {
      if (values_[k].size() != chain_[k].nnz()) {
        throw std::invalid_argument("FactorizedMatrix: factor " + std::to_string(k) +
                                    " value count differs from its support size");
      }
    }
  }

  [[nodiscard]] Index rows() const noexcept { return chain_.rows(); }
  [[nodiscard]] Index cols() const noexcept { return chain_.cols(); }
  [[nodiscard]] const ButterflyChain& chain() const noexcept { return chain_; }
  [[nodiscard]] std::size_t factor_count() const noexcept { return chain_.size(); }
  [[nodiscard]] const Vector& values(std::size_t k) const { return values_[k]; }
  [[nodiscard]] Vector& values(std::size_t k) { return values_[k]; }
  [[nodiscard]] Index param_count() const noexcept { return chain_.param_count(); }

 private:
  ButterflyChain chain_;
  std::vector<Vector> values_;
};

namespace detail {

inline void count_ops(OpCount* counter, const FactorSpec& f, Index columns) {
  if (counter) counter->operations += 2u * static_cast<std::uint64_t>(f.nnz() * columns);
}

}  // namespace detail

/// y = X x for one factor; x and y are row-major with one row per coordinate.
template <typename Scalar>
RowMatrixX<Scalar> apply_factor(const FactorSpec& f, const VectorX<Scalar>& values,
                                const RowMatrixX<Scalar>& x, OpCount* counter = nullptr) {
  if (x.rows() != f.cols()) throw std::domain_error("apply_factor: dimension mismatch");
  RowMatrixX<Scalar> y = RowMatrixX<Scalar>::Zero(f.rows(), x.cols());
  const Index s = f.block_cols;
  for (Index o = 0; o < f.outer; ++o) {
    for (Index br = 0; br < f.block_rows; ++br) {
      for (Index k = 0; k < f.inner; ++k) {
        const Index i = (o * f.block_rows + br) * f.inner + k;
        for (Index bc = 0; bc < s; ++bc) {
          const Index j = (o * s + bc) * f.inner + k;
          y.row(i) += values[i * s + bc] * x.row(j);
        }
      }
    }
  }
  detail::count_ops(counter, f, x.cols());
  return y;
}

/// x_grad = Xᵀ g for one factor.
template <typename Scalar>
RowMatrixX<Scalar> apply_factor_transpose(const FactorSpec& f, const VectorX<Scalar>& values,
                                          const RowMatrixX<Scalar>& g,
                                          OpCount* counter = nullptr) {
  if (g.rows() != f.rows()) throw std::domain_error("apply_factor_transpose: dimension mismatch");
  RowMatrixX<Scalar> x = RowMatrixX<Scalar>::Zero(f.cols(), g.cols());
  const Index s = f.block_cols;
  for (Index o = 0; o < f.outer; ++o) {
    for (Index br = 0; br < f.block_rows; ++br) {
      for (Index k = 0; k < f.inner; ++k) {
        const Index i = (o * f.block_rows + br) * f.inner + k;
        for (Index bc = 0; bc < s; ++bc) {
          const Index j = (o * s + bc) * f.inner + k;
          x.row(j) += values[i * s + bc] * g.row(i);
        }
      }
    }
  }
  detail::count_ops(counter, f, g.cols());
  return x;
}

/// Gradient of <g, X x> with respect to the factor's support values.
template <typename Scalar>
VectorX<Scalar> factor_value_gradient(const FactorSpec& f, const RowMatrixX<Scalar>& g,
                                      const RowMatrixX<Scalar>& x) {
  VectorX<Scalar> grad(f.nnz());
  const Index s = f.block_cols;
  for (Index o = 0; o < f.outer; ++o) {
    for (Index br = 0; br < f.block_rows; ++br) {
      for (Index k = 0; k < f.inner; ++k) {
        const Index i = (o * f.block_rows + br) * f.inner + k;
        for (Index bc = 0; bc < s; ++bc) {
          grad[i * s + bc] = g.row(i).dot(x.row((o * s + bc) * f.inner + k));
        }
      }
    }
  }
  return grad;
}

/// W·X for a block of column vectors, applying X^(L) first.
template <typename Scalar>
RowMatrixX<Scalar> factorized_apply(const FactorizedMatrix<Scalar>& fm, RowMatrixX<Scalar> x,
                                    OpCount* counter = nullptr) {
  if (x.rows() != fm.cols()) throw std::domain_error("factorized_apply: dimension mismatch");
  for (std::size_t k = fm.factor_count(); k-- > 0;) {
    x = apply_factor(fm.chain()[k], fm.values(k), x, counter);
  }
  return x;
}

/// Same as factorized_apply, additionally returning the input seen by every
/// factor (inputs[k] feeds X^(k+1)); used by reverse-mode differentiation.
template <typename Scalar>
RowMatrixX<Scalar> factorized_apply_traced(const FactorizedMatrix<Scalar>& fm,
                                           RowMatrixX<Scalar> x,
                                           std::vector<RowMatrixX<Scalar>>& inputs) {
  if (x.rows() != fm.cols()) throw std::domain_error("factorized_apply: dimension mismatch");
  inputs.assign(fm.factor_count(), {});
  for (std::size_t k = fm.factor_count(); k-- > 0;) {
    inputs[k] = x;
    x = apply_factor(fm.chain()[k], fm.values(k), x);
  }
  return x;
}

/// Wᵀ·G, applying X^(1)ᵀ first.
template <typename Scalar>
RowMatrixX<Scalar> factorized_apply_transpose(const FactorizedMatrix<Scalar>& fm,
                                              RowMatrixX<Scalar> g, OpCount* counter = nullptr) {
  if (g.rows() != fm.rows()) {
    throw std::domain_error("factorized_apply_transpose: dimension mismatch");
  }
  for (std::size_t k = 0; k < fm.factor_count(); ++k) {
    g = apply_factor_transpose(fm.chain()[k], fm.values(k), g, counter);
  }
  return g;
}

/// y = X^(1)(X^(2)(...(X^(L) x))) in O(Σ nnz) work.
template <typename Scalar>
VectorX<Scalar> factorized_matvec(const FactorizedMatrix<Scalar>& fm, const VectorX<Scalar>& x,
                                  OpCount* counter = nullptr) {
  if (x.size() != fm.cols()) throw std::domain_error("factorized_matvec: dimension mismatch");
  RowMatrixX<Scalar> column = x;
  return factorized_apply(fm, std::move(column), counter);
}

/// Dense embedding of factor k.
template <typename Scalar>
MatrixX<Scalar> factor_dense(const FactorSpec& f, const VectorX<Scalar>& values) {
  MatrixX<Scalar> d = MatrixX<Scalar>::Zero(f.rows(), f.cols());
  const auto support = f.support();
  for (Index e = 0; e < support.nnz(); ++e) {
    const auto& [r, c] = support.entries[static_cast<std::size_t>(e)];
    d(r, c) = values[e];
  }
  return d;
}

/// Dense m×n product of all factors.
template <typename Scalar>
MatrixX<Scalar> expand_dense(const FactorizedMatrix<Scalar>& fm) {
  MatrixX<Scalar> w = factor_dense(fm.chain()[0], fm.values(0));
  for (std::size_t k = 1; k < fm.factor_count(); ++k) {
    w = w * factor_dense(fm.chain()[k], fm.values(k));
  }
  return w;
}

}  // namespace sparsemia::butterfly
