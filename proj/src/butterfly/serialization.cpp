// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/butterfly/serialization.hpp"

#include <limits>

namespace sparsemia::butterfly {

void write_chain(io::BinaryWriter& out, const ButterflyChain& chain) {
  out.u32(static_cast<std::uint32_t>(chain.size()));
  for (const auto& f : chain) {
    for (Index v : {f.outer, f.block_rows, f.block_cols, f.inner}) {
      if (v > std::numeric_limits<std::int32_t>::max()) {
        throw std::overflow_error("write_chain: dimension exceeds 32 bits");
      }
      out.i32(static_cast<std::int32_t>(v));
    }
  }
}

ButterflyChain read_chain(io::BinaryReader& in) {
  const auto count = in.u32();
  if (count == 0 || count > 64) throw io::BadHeader("butterfly chain: implausible factor count");
  std::vector<FactorSpec> factors(count);
  for (auto& f : factors) {
    f.outer = in.i32();
    f.block_rows = in.i32();
    f.block_cols = in.i32();
    f.inner = in.i32();
  }
  return ButterflyChain(std::move(factors));
}

void write_factorized(std::ostream& os, const FactorizedMatrix<double>& fm) {
  io::BinaryWriter out(os);
  out.magic(kFactorizedMagic);
  out.u32(kFactorizedVersion);
  write_chain(out, fm.chain());
  for (std::size_t k = 0; k < fm.factor_count(); ++k) {
    for (double v : fm.values(k)) out.f64(v);
  }
}

FactorizedMatrix<double> read_factorized(std::istream& is) {
  io::BinaryReader in(is);
  in.expect_magic(kFactorizedMagic, "factorized matrix");
  if (in.u32() != kFactorizedVersion) throw io::BadHeader("factorized matrix: unsupported version");
  auto chain = read_chain(in);
  std::vector<Eigen::VectorXd> values;
  for (const auto& f : chain) {
    Eigen::VectorXd v(f.nnz());
    for (auto& x : v) x = in.f64();
    values.push_back(std::move(v));
  }
  return FactorizedMatrix<double>(std::move(chain), std::move(values));
}

}  // namespace sparsemia::butterfly
