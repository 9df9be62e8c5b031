#include "latebench/bundle.hpp"

#include <bit>
#include <cmath>

#include "byte_io.hpp"
#include "latebench/file_util.hpp"

namespace latebench {

std::uint16_t float_to_half(float value) noexcept {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(value);
  const std::uint32_t sign = (x >> 16) & 0x8000u;
  const std::uint32_t exp = (x >> 23) & 0xffu;
  std::uint32_t mant = x & 0x7fffffu;
  if (exp == 0xffu) return static_cast<std::uint16_t>(sign | 0x7c00u | (mant ? 0x200u : 0u));
  const int e = static_cast<int>(exp) - 127 + 15;
  if (e >= 0x1f) return static_cast<std::uint16_t>(sign | 0x7c00u);
  if (e <= 0) {
    if (e < -10) return static_cast<std::uint16_t>(sign);
    mant |= 0x800000u;
    const int shift = 14 - e;
    std::uint32_t half = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1u);
    const std::uint32_t halfway = 1u << (shift - 1);
    if (rem > halfway || (rem == halfway && (half & 1u))) ++half;
    return static_cast<std::uint16_t>(sign | half);
  }
  std::uint32_t half = sign | (static_cast<std::uint32_t>(e) << 10) | (mant >> 13);
  const std::uint32_t rem = mant & 0x1fffu;
  // Round to nearest even; a carry out of the mantissa correctly bumps the exponent.
  if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half;
  return static_cast<std::uint16_t>(half);
}

float half_to_float(std::uint16_t bits) noexcept {
  const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
  const std::uint32_t exp = (bits >> 10) & 0x1fu;
  const std::uint32_t mant = bits & 0x3ffu;
  if (exp == 0) {
    const float magnitude = std::ldexp(static_cast<float>(mant), -24);
    return sign ? -magnitude : magnitude;
  }
  if (exp == 0x1f) return std::bit_cast<float>(sign | 0x7f800000u | (mant << 13));
  return std::bit_cast<float>(sign | ((exp - 15 + 127) << 23) | (mant << 13));
}

std::string write_bundle(const Corpus& corpus, const std::vector<std::string>& comments) {
  const CorpusManifest& m = corpus.manifest();
  const std::size_t elem = dtype_bytes(m.dtype);
  std::string out;
  out += kBundleMagic;
  out += "\nversion " + std::to_string(kBundleVersion) + "\n";
  for (const auto& c : comments) out += comment_block(c);
  out += "dim " + std::to_string(m.dim) + "\n";
  out += "dtype " + std::string(dtype_name(m.dtype)) + "\n";
  out += "pooling " + std::string(pooling_name(m.pooling)) + "\n";
  out += "C " + std::to_string(m.slots) + "\n";
  out += "doc_count " + std::to_string(m.doc_count) + "\n";
  out += "total_vectors " + std::to_string(m.total_vectors) + "\n";
  std::size_t offset = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t rows = corpus.doc(i).rows();
    out += "doc " + corpus.id(i) + " " + std::to_string(rows) + " " + std::to_string(offset) + "\n";
    offset += rows * m.dim * elem;
  }
  out += "end\n";
  out.reserve(out.size() + offset);
  for (const auto& doc : corpus.docs()) {
    for (float v : doc.data()) {
      if (m.dtype == Dtype::kFloat16) {
        detail::put_u16(out, float_to_half(v));
      } else {
        detail::put_f32(out, v);
      }
    }
  }
  return out;
}

namespace {

struct BundleHeader {
  std::vector<std::string> comments;
  std::size_t dim = 0;
  Dtype dtype = Dtype::kFloat32;
  Pooling pooling = Pooling::kNone;
  std::size_t slots = 0;
  std::size_t doc_count = 0;
  std::size_t total_vectors = 0;
  struct Doc {
    std::string id;
    std::size_t rows;
    std::size_t offset;
  };
  std::vector<Doc> docs;
  std::size_t payload_start = 0;
};

BundleHeader parse_header(std::string_view bytes) {
  detail::HeaderReader reader(bytes, kBundleMagic, kBundleVersion);
  BundleHeader h;
  h.comments = reader.comments();
  h.dim = reader.expect_size("dim");
  const std::string dtype = reader.expect_word("dtype");
  if (dtype == "float32") {
    h.dtype = Dtype::kFloat32;
  } else if (dtype == "float16") {
    h.dtype = Dtype::kFloat16;
  } else {
    reader.malformed("unknown dtype '" + dtype + "'");
  }
  const std::string pooling = reader.expect_word("pooling");
  if (pooling == "none") {
    h.pooling = Pooling::kNone;
  } else if (pooling == "fixed") {
    h.pooling = Pooling::kFixed;
  } else {
    reader.malformed("unknown pooling '" + pooling + "'");
  }
  h.slots = reader.expect_size("C");
  h.doc_count = reader.expect_size("doc_count");
  h.total_vectors = reader.expect_size("total_vectors");
  for (std::size_t i = 0; i < h.doc_count; ++i) {
    const auto cols = reader.expect_fields("doc", 3);
    h.docs.push_back({cols[0], reader.to_size(cols[1]), reader.to_size(cols[2])});
  }
  reader.expect_end();
  h.payload_start = reader.position();
  return h;
}

}  // namespace

std::vector<std::string> bundle_comments(std::string_view bytes) { return parse_header(bytes).comments; }

Corpus read_bundle(std::string_view bytes) {
  const BundleHeader h = parse_header(bytes);
  const std::size_t elem = dtype_bytes(h.dtype);
  std::size_t expected = 0;
  std::size_t rows_total = 0;
  for (const auto& d : h.docs) {
    if (d.offset != expected) {
      fail(ErrorCode::kOffsetOverlap, "document '" + d.id + "' starts at byte " + std::to_string(d.offset) +
                                          ", expected " + std::to_string(expected));
    }
    expected += d.rows * h.dim * elem;
    rows_total += d.rows;
  }
  if (rows_total != h.total_vectors) {
    fail(ErrorCode::kMalformedLine, "total_vectors " + std::to_string(h.total_vectors) + " but documents hold " +
                                        std::to_string(rows_total));
  }
  const std::size_t payload = bytes.size() - h.payload_start;
  if (payload != expected) {
    fail(ErrorCode::kTruncatedPayload,
         "payload has " + std::to_string(payload) + " bytes, header declares " + std::to_string(expected));
  }

  std::vector<std::string> ids;
  std::vector<TokenMatrix> docs;
  ids.reserve(h.docs.size());
  docs.reserve(h.docs.size());
  const char* p = bytes.data() + h.payload_start;
  for (const auto& d : h.docs) {
    std::vector<float> data(d.rows * h.dim);
    for (float& v : data) {
      if (h.dtype == Dtype::kFloat16) {
        v = half_to_float(detail::get_u16(p));
        p += 2;
      } else {
        v = detail::get_f32(p);
        p += 4;
      }
    }
    ids.push_back(d.id);
    docs.emplace_back(d.rows, h.dim, std::move(data));
  }
  return Corpus(std::move(ids), std::move(docs), {.dtype = h.dtype, .pooling = h.pooling, .slots = h.slots});
}

}  // namespace latebench
