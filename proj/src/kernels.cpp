#include "latebench/kernels.hpp"

namespace latebench {

namespace {

constexpr std::size_t kLanes = 16;

// 16 independent partial sums let the compiler keep whole SIMD registers of
// accumulators; the final reduction order is fixed.
[[gnu::always_inline]] inline float dot_kernel(const float* a, const float* b, std::size_t n) {
  float acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l] * b[i + l];
  }
  for (std::size_t l = 0; i < n; ++i, ++l) acc[l] += a[i] * b[i];
  for (std::size_t w = kLanes / 2; w > 0; w /= 2) {
    for (std::size_t l = 0; l < w; ++l) acc[l] += acc[l + w];
  }
  return acc[0];
}

}  // namespace

[[gnu::target_clones("avx2", "default")]]
float dot(std::span<const float> a, std::span<const float> b) noexcept {
  return dot_kernel(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

[[gnu::target_clones("avx2", "default")]]
void dot_rows(std::span<const float> query, const float* rows, std::size_t count, std::size_t dim,
              float* out) noexcept {
  const float* q = query.data();
  for (std::size_t j = 0; j < count; ++j) out[j] = dot_kernel(q, rows + j * dim, dim);
}

}  // namespace latebench
