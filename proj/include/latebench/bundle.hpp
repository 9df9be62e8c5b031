#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "latebench/corpus.hpp"

namespace latebench {

// Embedding bundle layout:
//
//   LATEBENCH-BUNDLE\n
//   version 1\n
//   # <comment>\n            (any number)
//   dim <d>\n
//   dtype float32|float16\n
//   pooling none|fixed\n
//   C <slots>\n
//   doc_count <n>\n
//   total_vectors <t>\n
//   doc <id> <rows> <byte offset into payload>\n   (n lines, corpus order)
//   end\n
//   <payload: row-major little-endian matrices in the declared dtype>

inline constexpr std::string_view kBundleMagic = "LATEBENCH-BUNDLE";
inline constexpr int kBundleVersion = 1;

std::string write_bundle(const Corpus& corpus, const std::vector<std::string>& comments = {});
Corpus read_bundle(std::string_view bytes);

/// Comment lines carried by a bundle header (without the leading "# ").
std::vector<std::string> bundle_comments(std::string_view bytes);

std::uint16_t float_to_half(float value) noexcept;
float half_to_float(std::uint16_t bits) noexcept;

}  // namespace latebench
