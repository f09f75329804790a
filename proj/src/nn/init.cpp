// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/init.hpp"

#include "sparsemia/nn/parameter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsemia::nn {

Vector init_uniform_bound(Index count, double bound, Rng& rng) {
  if (!(bound > 0)) throw std::invalid_argument("init_uniform: bound must be positive");
  std::uniform_real_distribution<double> dist(-bound, bound);
  Vector v(count);
  for (auto& x : v) {
    do {
      x = dist(rng);
    } while (x == -bound);
  }
  return v;
}

Vector init_uniform(Index count, Index fan_in, Rng& rng) {
  if (fan_in < 1) throw std::invalid_argument("init_uniform: fan_in must be at least 1");
  return init_uniform_bound(count, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
}

Index SparseMask::count() const noexcept {
  return static_cast<Index>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

bool SparseMask::subset_of(const SparseMask& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] && !other.bits[i]) return false;
  }
  return true;
}

Parameter::Parameter(std::string name_, ParamRole role_, std::vector<Index> shape_)
    : name(std::move(name_)), role(role_), shape(std::move(shape_)) {
  Index n = 1;
  for (Index d : shape) n *= d;
  value = Vector::Zero(n);
  grad = Vector::Zero(n);
}

Index Parameter::active_count() const noexcept { return mask ? mask->count() : size(); }

void Parameter::apply_mask() {
  if (!mask) return;
  if (mask->size() != size()) throw std::logic_error("mask size differs from parameter " + name);
  for (Index i = 0; i < size(); ++i) {
    if (!mask->keeps(i)) {
      value[i] = 0.0;
      grad[i] = 0.0;
    }
  }
}

}  // namespace sparsemia::nn
