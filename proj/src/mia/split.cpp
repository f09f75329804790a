// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/mia/split.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sparsemia::mia {

const std::vector<Index>& MembershipSplit::train(Side side) const {
  return side == Side::target ? target_train : shadow_train;
}
const std::vector<Index>& MembershipSplit::test(Side side) const {
  return side == Side::target ? target_test : shadow_test;
}
const std::vector<Index>& MembershipSplit::validation(Side side) const {
  return side == Side::target ? target_val : shadow_val;
}

std::vector<Index> MembershipSplit::fitted(Side side) const {
  const auto& val = validation(side);
  std::vector<Index> out;
  for (Index i : train(side)) {
    if (std::find(val.begin(), val.end(), i) == val.end()) out.push_back(i);
  }
  return out;
}

Index validation_size(Index quarter) { return (quarter + 14) / 15; }

MembershipSplit partition(Index size, std::uint64_t master_seed) {
  const Index retained = size - size % 4;
  if (retained < kMinPartitionSize) {
    throw std::invalid_argument("partition: dataset of " + std::to_string(size) +
                                " samples is below the minimum of " + std::to_string(kMinPartitionSize));
  }
  std::vector<Index> order(static_cast<std::size_t>(size));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_seed(master_seed, 0x5917));
  std::shuffle(order.begin(), order.end(), rng);

  const auto q = static_cast<std::ptrdiff_t>(retained / 4);
  auto quarter = [&](std::ptrdiff_t k) {
    return std::vector<Index>(order.begin() + k * q, order.begin() + (k + 1) * q);
  };
  MembershipSplit split;
  split.target_train = quarter(0);
  split.target_test = quarter(1);
  split.shadow_train = quarter(2);
  split.shadow_test = quarter(3);
  const auto v = static_cast<std::ptrdiff_t>(validation_size(q));
  // Quarters are already in random order, so their prefixes are uniform draws.
  split.target_val.assign(split.target_train.begin(), split.target_train.begin() + v);
  split.shadow_val.assign(split.shadow_train.begin(), split.shadow_train.begin() + v);
  return split;
}

int membership_label(Index index, const MembershipSplit& split, Side side) {
  const auto contains = [index](const std::vector<Index>& set) {
    return std::find(set.begin(), set.end(), index) != set.end();
  };
  if (contains(split.train(side))) return 1;
  if (contains(split.test(side))) return 0;
  throw std::domain_error("membership_label: index " + std::to_string(index) + " is outside the side's data");
}

std::vector<LabeledIndex> evaluation_set(const MembershipSplit& split, Side side) {
  const auto members = split.fitted(side);
  const auto& test = split.test(side);
  const std::size_t n = std::min(members.size(), test.size());
  std::vector<LabeledIndex> out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({members[i], 1});
  for (std::size_t i = 0; i < n; ++i) out.push_back({test[i], 0});
  return out;
}

}  // namespace sparsemia::mia
