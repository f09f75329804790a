// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/imp/mask_io.hpp"

#include "sparsemia/io/binary.hpp"
#include "sparsemia/nn/checkpoint.hpp"

#include <fstream>
#include <iomanip>

namespace sparsemia::imp {

namespace {

constexpr io::Magic kMaskMagic{'M', 'A', 'S', 'K'};
constexpr std::uint32_t kMaskVersion = 1;

}  // namespace

void save_masks(const std::filesystem::path& path, const std::vector<NamedMask>& masks) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  io::BinaryWriter out(file);
  out.magic(kMaskMagic);
  out.u32(kMaskVersion);
  out.u32(static_cast<std::uint32_t>(masks.size()));
  for (const auto& m : masks) {
    out.string(m.name);
    out.u64(static_cast<std::uint64_t>(m.mask.size()));
    out.bytes(nn::pack_mask(m.mask));
  }
}

std::vector<NamedMask> load_masks(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  io::BinaryReader in(file);
  in.expect_magic(kMaskMagic, "mask file");
  if (in.u32() != kMaskVersion) throw io::BadHeader("mask file: unsupported version");
  std::vector<NamedMask> masks(in.u32());
  for (auto& m : masks) {
    m.name = in.string();
    const auto size = static_cast<Index>(in.u64());
    std::vector<std::uint8_t> packed(static_cast<std::size_t>((size + 7) / 8));
    in.bytes(packed);
    m.mask = nn::unpack_mask(packed, size);
  }
  return masks;
}

void write_imp_outputs(const std::filesystem::path& directory, const std::vector<ImpRound>& rounds,
                       const ImpSchedule& schedule) {
  std::filesystem::create_directories(directory);
  std::ofstream csv(directory / "summary.csv");
  csv << "round,survivors,prunable,survivor_fraction,best_epoch,best_val_accuracy\n";
  csv << std::setprecision(17);
  for (const auto& r : rounds) {
    const std::string stem = "round_" + std::to_string(r.round);
    nn::save_checkpoint(directory / (stem + ".ckpt"), r.model.network);
    std::vector<NamedMask> named;
    nn::Network copy = r.model.network;
    const auto params = prunable_parameters(copy, schedule);
    for (std::size_t i = 0; i < params.size() && i < r.masks.size(); ++i) {
      named.push_back({std::to_string(i) + ":" + params[i]->name, r.masks[i]});
    }
    save_masks(directory / (stem + ".mask"), named);
    const double best_acc =
        r.model.best_epoch >= 0 ? r.model.history[static_cast<std::size_t>(r.model.best_epoch)].val_accuracy : 0.0;
    csv << r.round << ',' << r.survivors << ',' << r.prunable << ',' << r.survivor_fraction() << ','
        << r.model.best_epoch << ',' << best_acc << '\n';
  }
}

}  // namespace sparsemia::imp
