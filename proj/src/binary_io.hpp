#pragma once

// Little-endian encoding helpers shared by the CMAT1 and CICA1 containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cica/error.hpp"

namespace cica::detail {

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return r;
  }
  return v;
}

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void bytes(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u64(std::uint64_t v) {
    v = to_le(v);
    bytes(&v, 8);
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<const double> vs) {
    for (double v : vs) f64(v);
  }

 private:
  std::ostream& os_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

  std::uint64_t offset() const noexcept { return offset_; }

  void bytes(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n)
      fail(ErrorKind::Parse, what_ + ": unexpected end of file at byte offset " + std::to_string(offset_));
    offset_ += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return to_le(v);
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> f64s(std::size_t n) {
    std::vector<double> out(n);
    for (double& v : out) v = f64();
    return out;
  }
  void expect_magic(std::string_view magic) {
    std::string got(magic.size(), '\0');
    bytes(got.data(), got.size());
    if (got != magic) fail(ErrorKind::Parse, what_ + ": bad magic at byte offset 0 (expected \"" + std::string(magic) + "\")");
  }
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, what_ + ": " + msg + " (byte offset " + std::to_string(offset_) + ")");
  }

 private:
  std::istream& is_;
  std::string what_;
  std::uint64_t offset_ = 0;
};

}  // namespace cica::detail
