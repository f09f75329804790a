// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/io/binary.hpp"

#include <bit>
#include <cstring>

namespace sparsemia::io {

namespace {

template <typename U>
void put_le(std::ostream& out, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  }
  out.write(buf, sizeof(U));
}

template <typename U>
U get_le(const unsigned char* buf) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(buf[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void BinaryWriter::magic(const Magic& m) { out_.write(m.data(), 4); }
void BinaryWriter::u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
void BinaryWriter::u32(std::uint32_t v) { put_le(out_, v); }
void BinaryWriter::i32(std::int32_t v) { put_le(out_, static_cast<std::uint32_t>(v)); }
void BinaryWriter::u64(std::uint64_t v) { put_le(out_, v); }
void BinaryWriter::i64(std::int64_t v) { put_le(out_, static_cast<std::uint64_t>(v)); }
void BinaryWriter::f64(double v) { put_le(out_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::bytes(std::span<const std::uint8_t> data) {
  out_.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size()));
}

void BinaryWriter::string(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryReader::read_exact(char* dst, std::size_t n) {
  in_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw TruncatedInput("unexpected end of binary stream");
  }
}

void BinaryReader::expect_magic(const Magic& expected, std::string_view what) {
  Magic got{};
  try {
    read_exact(got.data(), 4);
  } catch (const TruncatedInput&) {
    throw BadHeader(std::string(what) + ": missing magic bytes");
  }
  if (got != expected) {
    throw BadHeader(std::string(what) + ": bad magic bytes");
  }
}

std::uint8_t BinaryReader::u8() {
  char c;
  read_exact(&c, 1);
  return static_cast<std::uint8_t>(c);
}

std::uint32_t BinaryReader::u32() {
  unsigned char buf[4];
  read_exact(reinterpret_cast<char*>(buf), 4);
  return get_le<std::uint32_t>(buf);
}

std::int32_t BinaryReader::i32() { return static_cast<std::int32_t>(u32()); }

std::uint64_t BinaryReader::u64() {
  unsigned char buf[8];
  read_exact(reinterpret_cast<char*>(buf), 8);
  return get_le<std::uint64_t>(buf);
}

std::int64_t BinaryReader::i64() { return static_cast<std::int64_t>(u64()); }

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

void BinaryReader::bytes(std::span<std::uint8_t> out) {
  read_exact(reinterpret_cast<char*>(out.data()), out.size());
}

std::string BinaryReader::string() {
  const auto n = u32();
  std::string s(n, '\0');
  read_exact(s.data(), n);
  return s;
}

}  // namespace sparsemia::io
