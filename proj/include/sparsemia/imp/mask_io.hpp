// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/imp/imp.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sparsemia::imp {

struct NamedMask {
  std::string name;
  nn::SparseMask mask;
};

// Mask file, integers little-endian:
//   "MASK"  u32 version (=1)  u32 tensor count
//   per tensor: u32 name length, name bytes, u64 entry count,
//               ⌈count/8⌉ bytes of bits, LSB first
void save_masks(const std::filesystem::path& path, const std::vector<NamedMask>& masks);
std::vector<NamedMask> load_masks(const std::filesystem::path& path);

/// Writes round_<k>.ckpt (final weights) and round_<k>.mask for every round
/// plus summary.csv with columns round,survivors,prunable,survivor_fraction,
/// best_epoch,best_val_accuracy.
void write_imp_outputs(const std::filesystem::path& directory, const std::vector<ImpRound>& rounds,
                       const ImpSchedule& schedule);

}  // namespace sparsemia::imp
