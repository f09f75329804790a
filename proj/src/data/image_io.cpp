// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/data/image_io.hpp"

#include "sparsemia/io/binary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sparsemia::data {

namespace {

constexpr io::Magic kImageMagic{'S', 'P', 'D', 'S'};
constexpr std::uint32_t kImageVersion = 1;
constexpr Index kCifarSide = 32;
constexpr Index kCifarRecord = 1 + 3 * kCifarSide * kCifarSide;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetErrorKind::io, "cannot open " + path.string());
  return in;
}

void read_records(io::BinaryReader& in, LabeledDataset& d, Index first, Index count,
                  const std::string& source) {
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(d.feature_size()));
  for (Index i = first; i < first + count; ++i) {
    try {
      const int label = in.u8();
      if (label >= d.classes) {
        throw DatasetError(DatasetErrorKind::label_out_of_range,
                           source + ": label " + std::to_string(label) + " out of range");
      }
      in.bytes(pixels);
      d.labels[static_cast<std::size_t>(i)] = label;
    } catch (const io::TruncatedInput&) {
      throw DatasetError(DatasetErrorKind::truncated,
                         source + ": truncated payload at record " + std::to_string(i));
    }
    for (Index k = 0; k < d.feature_size(); ++k) {
      d.inputs(k, i) = pixels[static_cast<std::size_t>(k)] / 255.0;
    }
  }
}

}  // namespace

const char* to_string(DatasetErrorKind kind) {
  switch (kind) {
    case DatasetErrorKind::io: return "io";
    case DatasetErrorKind::corrupt_header: return "corrupt_header";
    case DatasetErrorKind::truncated: return "truncated";
    case DatasetErrorKind::label_out_of_range: return "label_out_of_range";
  }
  return "unknown";
}

LabeledDataset load_image_dataset(const std::filesystem::path& path, bool normalize) {
  auto file = open_input(path);
  io::BinaryReader in(file);
  std::uint32_t count = 0;
  ImageShape shape;
  std::uint32_t classes = 0;
  try {
    in.expect_magic(kImageMagic, path.string());
    if (in.u32() != kImageVersion) throw io::BadHeader("unsupported version");
    count = in.u32();
    shape.channels = in.u32();
    shape.height = in.u32();
    shape.width = in.u32();
    classes = in.u32();
  } catch (const std::runtime_error& e) {
    throw DatasetError(DatasetErrorKind::corrupt_header, path.string() + ": " + e.what());
  }
  if (shape.channels < 1 || shape.height < 1 || shape.width < 1 || classes < 1 ||
      classes > 256 || shape.size() > (Index{1} << 24)) {
    throw DatasetError(DatasetErrorKind::corrupt_header, path.string() + ": invalid dimensions");
  }
  LabeledDataset d;
  d.classes = static_cast<int>(classes);
  d.image = shape;
  d.inputs.resize(shape.size(), count);
  d.labels.resize(count);
  read_records(in, d, 0, count, path.string());
  if (normalize) data::normalize(d);
  return d;
}

void write_image_dataset(const std::filesystem::path& path, const LabeledDataset& dataset) {
  dataset.validate();
  if (!dataset.image) throw std::invalid_argument("write_image_dataset: dataset has no image shape");
  if (dataset.normalization.applied) {
    throw std::invalid_argument("write_image_dataset: expects un-normalized pixels");
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DatasetError(DatasetErrorKind::io, "cannot write " + path.string());
  io::BinaryWriter out(file);
  out.magic(kImageMagic);
  out.u32(kImageVersion);
  out.u32(static_cast<std::uint32_t>(dataset.size()));
  out.u32(static_cast<std::uint32_t>(dataset.image->channels));
  out.u32(static_cast<std::uint32_t>(dataset.image->height));
  out.u32(static_cast<std::uint32_t>(dataset.image->width));
  out.u32(static_cast<std::uint32_t>(dataset.classes));
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(dataset.feature_size()));
  for (Index i = 0; i < dataset.size(); ++i) {
    out.u8(static_cast<std::uint8_t>(dataset.labels[static_cast<std::size_t>(i)]));
    for (Index k = 0; k < dataset.feature_size(); ++k) {
      const double v = std::clamp(dataset.inputs(k, i), 0.0, 1.0);
      pixels[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    out.bytes(pixels);
  }
  if (!file) throw DatasetError(DatasetErrorKind::io, "write failed: " + path.string());
}

LabeledDataset load_cifar10(const std::vector<std::filesystem::path>& batches, bool normalize) {
  if (batches.empty()) throw std::invalid_argument("load_cifar10: no batch files");
  std::vector<Index> counts;
  Index total = 0;
  for (const auto& p : batches) {
    std::error_code ec;
    const auto bytes = static_cast<Index>(std::filesystem::file_size(p, ec));
    if (ec) throw DatasetError(DatasetErrorKind::io, "cannot stat " + p.string());
    if (bytes == 0) throw DatasetError(DatasetErrorKind::corrupt_header, p.string() + ": empty file");
    if (bytes % kCifarRecord != 0) {
      throw DatasetError(DatasetErrorKind::truncated,
                         p.string() + ": size is not a whole number of records");
    }
    counts.push_back(bytes / kCifarRecord);
    total += counts.back();
  }
  LabeledDataset d;
  d.classes = 10;
  d.image = ImageShape{3, kCifarSide, kCifarSide};
  d.inputs.resize(d.image->size(), total);
  d.labels.resize(static_cast<std::size_t>(total));
  Index first = 0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    auto file = open_input(batches[b]);
    io::BinaryReader in(file);
    read_records(in, d, first, counts[b], batches[b].string());
    first += counts[b];
  }
  if (normalize) data::normalize(d);
  return d;
}

}  // namespace sparsemia::data
