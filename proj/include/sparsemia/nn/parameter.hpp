// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparsemia::nn {

/// 0/1 mask congruent with a parameter vector; 1 marks a surviving weight.
struct SparseMask {
  std::vector<std::uint8_t> bits;

  SparseMask() = default;
  explicit SparseMask(Index size, std::uint8_t fill = 1)
      : bits(static_cast<std::size_t>(size), fill) {}

  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(bits.size()); }
  [[nodiscard]] Index count() const noexcept;
  [[nodiscard]] bool keeps(Index i) const { return bits[static_cast<std::size_t>(i)] != 0; }
  /// True when every kept position of *this is also kept by `other`.
  [[nodiscard]] bool subset_of(const SparseMask& other) const;

  friend bool operator==(const SparseMask&, const SparseMask&) = default;
};

enum class ParamRole : std::uint32_t {
  weight = 0,       // dense/conv weights, the only prunable role
  bias = 1,
  norm_scale = 2,
  norm_shift = 3,
  factor = 4,       // support values of one butterfly factor
  buffer = 5,       // non-trainable state (batchnorm running statistics)
};

struct Parameter {
  std::string name;
  ParamRole role = ParamRole::weight;
  std::vector<Index> shape;
  Vector value;
  Vector grad;
  std::optional<SparseMask> mask;

  Parameter() = default;
  Parameter(std::string name, ParamRole role, std::vector<Index> shape);

  [[nodiscard]] Index size() const noexcept { return value.size(); }
  [[nodiscard]] bool trainable() const noexcept { return role != ParamRole::buffer; }
  [[nodiscard]] bool prunable() const noexcept { return role == ParamRole::weight; }
  /// Number of entries that the mask keeps (all entries when unmasked).
  [[nodiscard]] Index active_count() const noexcept;
  /// Zeroes value and gradient wherever the mask drops an entry.
  void apply_mask();
};

}  // namespace sparsemia::nn
