#pragma once

#include <cstddef>
#include <span>

namespace latebench {

// Inner product with a fixed summation order: bit-stable for a given build.
float dot(std::span<const float> a, std::span<const float> b) noexcept;

// out[j] = dot(query, rows[j]) for a row-major block of `count` rows.
void dot_rows(std::span<const float> query, const float* rows, std::size_t count, std::size_t dim,
              float* out) noexcept;

}  // namespace latebench
