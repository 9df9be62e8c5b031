#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "latebench/token_matrix.hpp"

namespace latebench {

/// Spherical k-means over unit vectors.
///
/// Seeding is greedy k-means++ (squared chord distance 2 - 2cos, 2 + ln k
/// candidates per step) driven by `seed`.
/// Each iteration assigns every vector to its highest-dot centroid (lowest
/// id on ties) and replaces centroids with renormalized means. Empty or
/// degenerate clusters are reseeded with the vector farthest from its
/// current centroid. Stops after `iters` updates or once assignments stop
/// changing. Fails with kTooFewVectors when vectors.rows() < k.
TokenMatrix train_kmeans(const TokenMatrix& vectors, std::size_t k, std::size_t iters,
                         std::uint64_t seed);

/// Argmax-dot centroid per row of `vectors` (ties to the lowest id).
std::vector<std::uint32_t> assign_nearest(const TokenMatrix& centroids, const TokenMatrix& vectors);

}  // namespace latebench
