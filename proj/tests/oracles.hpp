// SPDX-License-Identifier: Apache-2.0
// Reference implementations used only by the tests.
#pragma once

#include "sparsemia/butterfly/chain.hpp"
#include "sparsemia/nn/types.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>

namespace oracle {

using sparsemia::Index;
using sparsemia::Matrix;
using sparsemia::Vector;

/// Dense factor straight from I_outer ⊗ 1_{br×bc} ⊗ I_inner: row r touches
/// columns o·bc·inner + b·inner + i, and its b-th value is stored at r·bc + b.
inline Matrix dense_factor(const sparsemia::butterfly::FactorSpec& f, const Vector& values) {
  Matrix d = Matrix::Zero(f.rows(), f.cols());
  for (Index r = 0; r < f.rows(); ++r) {
    const Index o = r / (f.block_rows * f.inner);
    const Index i = r % f.inner;
    for (Index b = 0; b < f.block_cols; ++b) {
      d(r, o * f.block_cols * f.inner + b * f.inner + i) = values[r * f.block_cols + b];
    }
  }
  return d;
}

inline Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline Matrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < r; ++i) m(i, j) = g(rng);
  }
  return m;
}

inline double relative_error(const Matrix& a, const Matrix& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

/// Central difference of f at x in every coordinate.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, Vector x, double h = 1e-6) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace oracle
