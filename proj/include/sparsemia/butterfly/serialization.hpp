// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/butterfly/factorized_matrix.hpp"
#include "sparsemia/io/binary.hpp"

#include <iosfwd>

namespace sparsemia::butterfly {

// Container layout, all integers little-endian:
//   "BFLY"  u32 version (=1)  u32 factor count L
//   L × (i32 outer, i32 block_rows, i32 block_cols, i32 inner)
//   for each factor in order: nnz × f64 values, row-major support order
inline constexpr io::Magic kFactorizedMagic{'B', 'F', 'L', 'Y'};
inline constexpr std::uint32_t kFactorizedVersion = 1;

void write_chain(io::BinaryWriter& out, const ButterflyChain& chain);
ButterflyChain read_chain(io::BinaryReader& in);

void write_factorized(std::ostream& out, const FactorizedMatrix<double>& fm);
FactorizedMatrix<double> read_factorized(std::istream& in);

}  // namespace sparsemia::butterfly
