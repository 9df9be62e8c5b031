#include "latebench/residual.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latebench/error.hpp"
#include "latebench/token_matrix.hpp"

namespace latebench {

void check_residual_bits(unsigned bits) {
  if (bits != 1 && bits != 2) {
    fail(ErrorCode::kUnsupportedBits, "residual bits must be 1 or 2, got " + std::to_string(bits));
  }
}

std::size_t packed_residual_bytes(std::size_t dim, unsigned bits) { return (dim * bits + 7) / 8; }

ResidualCode quantize_residual(std::span<const float> residual, unsigned bits) {
  check_residual_bits(bits);
  const unsigned top = (1u << bits) - 1;
  ResidualCode code;
  code.packed.assign(packed_residual_bytes(residual.size(), bits), 0);
  float scale = 0.0f;
  for (float r : residual) scale = std::max(scale, std::abs(r));
  code.scale = scale;
  if (scale == 0.0f) return code;  // all levels collapse to zero; codes stay 0
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double t = (static_cast<double>(residual[i]) + scale) / (2.0 * scale) * top;
    const auto level = static_cast<unsigned>(std::clamp(std::lround(t), 0L, static_cast<long>(top)));
    const std::size_t bit = i * bits;
    code.packed[bit / 8] |= static_cast<std::uint8_t>(level << (bit % 8));
  }
  return code;
}

std::vector<float> dequantize_residual(const ResidualCode& code, std::size_t dim, unsigned bits) {
  check_residual_bits(bits);
  if (code.packed.size() != packed_residual_bytes(dim, bits)) {
    fail(ErrorCode::kInvalidArgument, "residual code has " + std::to_string(code.packed.size()) +
                                          " bytes, expected " + std::to_string(packed_residual_bytes(dim, bits)));
  }
  const unsigned top = (1u << bits) - 1;
  const double s = code.scale;
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t bit = i * bits;
    const unsigned level = (code.packed[bit / 8] >> (bit % 8)) & top;
    out[i] = static_cast<float>(-s + 2.0 * s * level / top);
  }
  return out;
}

ResidualCode encode_residual(std::span<const float> vector, std::span<const float> centroid, unsigned bits) {
  if (vector.size() != centroid.size()) fail(ErrorCode::kDimensionMismatch, "vector and centroid dims differ");
  std::vector<float> residual(vector.size());
  for (std::size_t i = 0; i < vector.size(); ++i) residual[i] = vector[i] - centroid[i];
  return quantize_residual(residual, bits);
}

std::vector<float> decode_residual(const ResidualCode& code, std::span<const float> centroid, unsigned bits) {
  std::vector<float> out = dequantize_residual(code, centroid.size(), bits);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += centroid[i];
  if (!normalize(out)) out.assign(centroid.begin(), centroid.end());
  return out;
}

}  // namespace latebench
