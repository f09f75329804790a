// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/checkpoint.hpp"

#include "sparsemia/io/binary.hpp"

#include <fstream>
#include <stdexcept>

namespace sparsemia::nn {

namespace {

constexpr io::Magic kCheckpointMagic{'S', 'P', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

std::vector<std::uint8_t> pack_mask(const SparseMask& mask) {
  std::vector<std::uint8_t> packed(static_cast<std::size_t>((mask.size() + 7) / 8), 0);
  for (Index i = 0; i < mask.size(); ++i) {
    if (mask.keeps(i)) packed[static_cast<std::size_t>(i / 8)] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return packed;
}

SparseMask unpack_mask(std::span<const std::uint8_t> packed, Index size) {
  if (static_cast<Index>(packed.size()) != (size + 7) / 8) {
    throw std::invalid_argument("unpack_mask: packed length does not match mask size");
  }
  SparseMask mask(size, 0);
  for (Index i = 0; i < size; ++i) {
    mask.bits[static_cast<std::size_t>(i)] = (packed[static_cast<std::size_t>(i / 8)] >> (i % 8)) & 1u;
  }
  return mask;
}

void write_checkpoint(std::ostream& os, const Network& network) {
  io::BinaryWriter out(os);
  out.magic(kCheckpointMagic);
  out.u32(kCheckpointVersion);
  out.u32(static_cast<std::uint32_t>(network.size()));
  for (std::size_t i = 0; i < network.size(); ++i) {
    const Layer& layer = network.layer(i);
    out.u32(static_cast<std::uint32_t>(layer.kind()));
    const auto cfg = layer.config();
    out.u32(static_cast<std::uint32_t>(cfg.size()));
    for (auto v : cfg) out.i64(v);
    const auto params = layer.parameters();
    out.u32(static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
      out.string(p.name);
      out.u32(static_cast<std::uint32_t>(p.role));
      out.u32(static_cast<std::uint32_t>(p.shape.size()));
      for (auto d : p.shape) out.i64(d);
      for (double v : p.value) out.f64(v);
      out.u8(p.mask ? 1 : 0);
      if (p.mask) out.bytes(pack_mask(*p.mask));
    }
  }
}

Network read_checkpoint(std::istream& is) {
  io::BinaryReader in(is);
  in.expect_magic(kCheckpointMagic, "checkpoint");
  if (in.u32() != kCheckpointVersion) throw io::BadHeader("checkpoint: unsupported version");
  const auto layers = in.u32();
  Network net;
  for (std::uint32_t i = 0; i < layers; ++i) {
    const auto kind = static_cast<LayerKind>(in.u32());
    std::vector<std::int64_t> cfg(in.u32());
    for (auto& v : cfg) v = in.i64();
    auto layer = make_layer(kind, cfg);
    auto params = layer->parameters();
    if (in.u32() != params.size()) throw io::BadHeader("checkpoint: parameter count mismatch");
    for (auto& p : params) {
      if (in.string() != p.name) throw io::BadHeader("checkpoint: parameter name mismatch");
      if (in.u32() != static_cast<std::uint32_t>(p.role)) {
        throw io::BadHeader("checkpoint: parameter role mismatch");
      }
      std::vector<Index> shape(in.u32());
      for (auto& d : shape) d = in.i64();
      if (shape != p.shape) throw io::BadHeader("checkpoint: parameter shape mismatch");
      for (auto& v : p.value) v = in.f64();
      if (in.u8() != 0) {
        std::vector<std::uint8_t> packed(static_cast<std::size_t>((p.size() + 7) / 8));
        in.bytes(packed);
        p.mask = unpack_mask(packed, p.size());
      }
    }
    net.push_back(std::move(layer));
  }
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Network& network) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, network);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace sparsemia::nn
