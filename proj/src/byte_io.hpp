#pragma once

// Little-endian field encoding and the line-oriented text header shared by
// bundle and index files. Internal to the library.

#include <bit>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "latebench/error.hpp"

namespace latebench::detail {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xffu));
  out.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xffu));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline std::uint16_t get_u16(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t get_u32(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline float get_f32(const char* p) { return std::bit_cast<float>(get_u32(p)); }

class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, std::string_view magic, int version) : bytes_(bytes) {
    std::string_view line;
    if (!raw_line(line) || line != magic) {
      fail(ErrorCode::kBadMagic, "expected magic '" + std::string(magic) + "'");
    }
    const auto fields = expect_fields("version", 1);
    int found = 0;
    const auto res = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), found);
    if (res.ec != std::errc() || res.ptr != fields[0].data() + fields[0].size()) malformed("bad version");
    if (found != version) {
      fail(ErrorCode::kVersionMismatch,
           "file version " + std::to_string(found) + ", reader supports " + std::to_string(version));
    }
    skip_comments();
  }

  const std::vector<std::string>& comments() const noexcept { return comments_; }
  std::size_t position() const noexcept { return pos_; }

  [[noreturn]] void malformed(const std::string& what) const {
    fail(ErrorCode::kMalformedLine, "header line " + std::to_string(line_no_) + ": " + what);
  }

  /// Next non-comment line, split on single spaces; first field must be key.
  std::vector<std::string> expect_fields(std::string_view key, std::size_t count) {
    std::string_view line = next_line();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(' ', start);
      if (end == std::string_view::npos) end = line.size();
      fields.emplace_back(line.substr(start, end - start));
      start = end + 1;
    }
    if (fields.empty() || fields[0] != key) malformed("expected '" + std::string(key) + "'");
    if (fields.size() != count + 1) {
      malformed("'" + std::string(key) + "' takes " + std::to_string(count) + " value(s)");
    }
    fields.erase(fields.begin());
    return fields;
  }

  std::string expect_word(std::string_view key) { return expect_fields(key, 1)[0]; }
  std::size_t expect_size(std::string_view key) { return to_size(expect_word(key)); }

  std::size_t to_size(const std::string& s) const {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) malformed("bad integer '" + s + "'");
    return v;
  }

  /// Key of the next non-comment line without consuming it.
  std::string_view peek_key() {
    skip_comments();
    const std::size_t end = bytes_.find('\n', pos_);
    if (end == std::string_view::npos) malformed("unterminated header");
    const std::string_view line = bytes_.substr(pos_, end - pos_);
    return line.substr(0, line.find(' '));
  }

  void expect_end() {
    if (next_line() != "end") malformed("expected 'end'");
  }

 private:
  bool raw_line(std::string_view& line) {
    const std::size_t end = bytes_.find('\n', pos_);
    if (end == std::string_view::npos) return false;
    line = bytes_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  void skip_comments() {
    while (pos_ < bytes_.size() && bytes_[pos_] == '#') {
      std::string_view line;
      if (!raw_line(line)) malformed("unterminated header");
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      comments_.emplace_back(line);
    }
  }

  std::string_view next_line() {
    skip_comments();
    std::string_view line;
    if (!raw_line(line)) malformed("unterminated header");
    return line;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  std::vector<std::string> comments_;
};

}  // namespace latebench::detail
