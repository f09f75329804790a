// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsemia::io {

/// Raised when a stream ends before a fixed-size field was fully read.
class TruncatedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a container's magic bytes or version do not match.
class BadHeader : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Magic = std::array<char, 4>;

/// Little-endian writer, independent of host byte order.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void magic(const Magic& m);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void i32(std::int32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v);
  void f64(double v);
  void bytes(std::span<const std::uint8_t> data);
  void string(std::string_view s);

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  /// Reads four bytes and throws BadHeader if they differ from `expected`.
  void expect_magic(const Magic& expected, std::string_view what);
  std::uint8_t u8();
  std::uint32_t u32();
  std::int32_t i32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  void bytes(std::span<std::uint8_t> out);
  std::string string();

 private:
  void read_exact(char* dst, std::size_t n);
  std::istream& in_;
};

}  // namespace sparsemia::io
