#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace latebench {

/// Per-vector symmetric uniform quantizer for residuals (vector - centroid).
///
/// With scale s = max_i |r_i| and L = 2^bits levels, level j reconstructs to
/// -s + j * 2s / (L - 1); each component takes its nearest level. Codes are
/// packed little-endian, component i at bit offset i * bits.
struct ResidualCode {
  float scale = 0.0f;
  std::vector<std::uint8_t> packed;

  bool operator==(const ResidualCode&) const = default;
};

/// Fails with kUnsupportedBits unless bits is 1 or 2.
void check_residual_bits(unsigned bits);

std::size_t packed_residual_bytes(std::size_t dim, unsigned bits);

/// Quantizes an arbitrary residual vector.
ResidualCode quantize_residual(std::span<const float> residual, unsigned bits);

/// Reconstructed residual (no renormalization).
std::vector<float> dequantize_residual(const ResidualCode& code, std::size_t dim, unsigned bits);

ResidualCode encode_residual(std::span<const float> vector, std::span<const float> centroid,
                             unsigned bits);

/// centroid + dequantized residual, renormalized to unit length.
std::vector<float> decode_residual(const ResidualCode& code, std::span<const float> centroid,
                                   unsigned bits);

}  // namespace latebench
