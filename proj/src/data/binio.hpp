#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace swr::data {

// Little-endian binary writer with explicit byte assembly, so files are
// identical regardless of host quirks.
class BinWriter {
 public:
  explicit BinWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  }

  void u8(std::uint8_t v) { raw(&v, 1); }
  void u16(std::uint16_t v) {
    std::uint8_t b[2] = {static_cast<std::uint8_t>(v),
                         static_cast<std::uint8_t>(v >> 8)};
    raw(b, 2);
  }
  void u32(std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    raw(b, 4);
  }
  void u64(std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    raw(b, 8);
  }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void bytes(const void* p, std::size_t n) { raw(p, n); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }

  void close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failure on " + path_);
    out_.close();
  }

 private:
  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw std::runtime_error("write failure on " + path_);
  }

  std::ofstream out_;
  std::string path_;
};

// Reader that tracks the byte offset and reports it on every failure.
class BinReader {
 public:
  explicit BinReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open " + path + " for reading");
  }

  std::uint8_t u8() {
    std::uint8_t v;
    raw(&v, 1);
    return v;
  }
  std::uint16_t u16() {
    std::uint8_t b[2];
    raw(b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    std::uint8_t b[4];
    raw(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint8_t b[8];
    raw(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  void bytes_into(void* p, std::size_t n) { raw(p, n); }

  std::string str(std::size_t max_len = 1 << 20) {
    const std::size_t start = offset_;
    const std::uint32_t n = u32();
    if (n > max_len)
      fail_at(start, "unreasonable string length " + std::to_string(n));
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }

  std::size_t offset() const { return offset_; }

  // Fails exactly like a read that runs off the end, but before the caller
  // allocates count*elem_size bytes of destination for a length a corrupt
  // header invented. count > avail/elem_size avoids the overflowable product.
  void require_available(std::uint64_t count, std::uint64_t elem_size = 1) {
    const auto pos = in_.tellg();
    in_.seekg(0, std::ios::end);
    const std::uint64_t end = static_cast<std::uint64_t>(in_.tellg());
    in_.seekg(pos);
    const std::uint64_t avail = end - offset_;
    if (count > avail / elem_size)
      fail_at(static_cast<std::size_t>(offset_ + avail),
              "unexpected end of file");
  }

  void expect_eof() {
    char c;
    in_.read(&c, 1);
    if (!in_.eof())
      fail_at(offset_, "trailing data after the expected end of file");
  }

  [[noreturn]] void fail(const std::string& msg) { fail_at(offset_, msg); }
  [[noreturn]] void fail_at(std::size_t off, const std::string& msg) {
    throw std::runtime_error(path_ + ": " + msg + " at byte " +
                             std::to_string(off));
  }

 private:
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      fail_at(offset_ + static_cast<std::size_t>(in_.gcount()),
              "unexpected end of file");
    offset_ += n;
  }

  std::ifstream in_;
  std::string path_;
  std::size_t offset_ = 0;
};

}  // namespace swr::data
