// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/nn/network.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace sparsemia::nn {

// Network checkpoint, integers little-endian, floats IEEE-754 binary64 LE:
//   "SPCK"  u32 version (=1)  u32 layer count
//   per layer (the manifest):
//     u32 kind  u32 n  n × i64 config   (butterfly configs embed the chain
//                                        quadruples as in the "BFLY" container)
//     u32 parameter count
//     per parameter:
//       u32 name length, name bytes  u32 role  u32 rank  rank × i64 dims
//       prod(dims) × f64 values
//       u8 has_mask  [⌈prod(dims)/8⌉ bytes of mask bits, LSB first]
void write_checkpoint(std::ostream& out, const Network& network);
Network read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Network& network);
Network load_checkpoint(const std::filesystem::path& path);

/// Bit-packs a mask, least significant bit first.
std::vector<std::uint8_t> pack_mask(const SparseMask& mask);
SparseMask unpack_mask(std::span<const std::uint8_t> packed, Index size);

}  // namespace sparsemia::nn
