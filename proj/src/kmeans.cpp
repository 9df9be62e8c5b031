#include "latebench/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "latebench/kernels.hpp"
#include "latebench/parallel.hpp"

namespace latebench {

namespace {

constexpr std::size_t kBlock = 256;

struct Assignment {
  std::vector<std::uint32_t> ids;
  std::vector<float> best;  // dot with the assigned centroid
};

Assignment assign(const TokenMatrix& centroids, const TokenMatrix& vectors) {
  const std::size_t n = vectors.rows();
  const std::size_t k = centroids.rows();
  Assignment a{std::vector<std::uint32_t>(n), std::vector<float>(n)};
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<float> scores(k);
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      dot_rows(vectors.row(i), centroids.data().data(), k, centroids.dim(), scores.data());
      std::uint32_t best = 0;
      for (std::uint32_t c = 1; c < k; ++c) {
        if (scores[c] > scores[best]) best = c;
      }
      a.ids[i] = best;
      a.best[i] = scores[best];
    }
  });
  return a;
}

// Squared chord distance between unit vectors.
float chord(float dot_value) { return std::max(0.0f, 2.0f - 2.0f * dot_value); }

// Greedy k-means++: each step draws 2 + floor(ln k) D^2-weighted candidates
// and keeps the one that lowers the total potential most.
TokenMatrix seed_plus_plus(const TokenMatrix& vectors, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = vectors.rows();
  const std::size_t dim = vectors.dim();
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  TokenMatrix centroids(k, dim);
  std::vector<char> chosen(n, 0);
  std::vector<float> dist(n, std::numeric_limits<float>::max());
  std::vector<float> trial_dist(n), best_dist(n);

  auto take = [&](std::size_t c, std::size_t idx) {
    chosen[idx] = 1;
    const auto src = vectors.row(idx);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
  };
  // Distances after adding vector idx as a center, and their sum.
  auto potential = [&](std::size_t idx, std::vector<float>& out) {
    const auto center = vectors.row(idx);
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b) {
      const std::size_t end = std::min(n, (b + 1) * kBlock);
      double s = 0.0;
      for (std::size_t i = b * kBlock; i < end; ++i) {
        out[i] = std::min(dist[i], chord(dot(vectors.row(i), center)));
        s += out[i];
      }
      partial[b] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
  };
  // D^2-weighted draw among unchosen vectors; n when all mass is zero.
  auto draw = [&]() {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i]) total += dist[i];
    }
    if (!(total > 0.0)) return n;
    const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      acc += dist[i];
      if (acc > r) return i;
    }
    // Rounding can leave r at the very end of the cumulative sum.
    for (std::size_t i = n; i-- > 0;) {
      if (!chosen[i] && dist[i] > 0.0f) return i;
    }
    return n;
  };

  const std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  take(0, first);
  potential(first, dist);
  for (std::size_t c = 1; c < k; ++c) {
    std::size_t best = n;
    double best_total = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t idx = draw();
      if (idx == n) break;
      const double total = potential(idx, trial_dist);
      if (best == n || total < best_total) {
        best = idx;
        best_total = total;
        best_dist.swap(trial_dist);
      }
    }
    if (best == n) {
      // Every remaining vector coincides with a chosen center.
      best = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
      potential(best, best_dist);
    }
    take(c, best);
    dist.swap(best_dist);
  }
  return centroids;
}

}  // namespace

std::vector<std::uint32_t> assign_nearest(const TokenMatrix& centroids, const TokenMatrix& vectors) {
  if (centroids.empty()) fail(ErrorCode::kEmptyIndex, "no centroids");
  if (centroids.dim() != vectors.dim()) {
    fail(ErrorCode::kDimensionMismatch, "centroid dim " + std::to_string(centroids.dim()) + " vs vector dim " +
                                            std::to_string(vectors.dim()));
  }
  return assign(centroids, vectors).ids;
}

TokenMatrix train_kmeans(const TokenMatrix& vectors, std::size_t k, std::size_t iters, std::uint64_t seed) {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k-means needs k >= 1");
  if (vectors.rows() < k) {
    fail(ErrorCode::kTooFewVectors,
         "k-means with k=" + std::to_string(k) + " needs at least k vectors, got " + std::to_string(vectors.rows()));
  }
  const std::size_t n = vectors.rows();
  const std::size_t dim = vectors.dim();
  std::mt19937_64 rng(seed);
  TokenMatrix centroids = seed_plus_plus(vectors, k, rng);

  std::vector<std::uint32_t> previous;
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it < iters; ++it) {
    Assignment a = assign(centroids, vectors);
    if (a.ids == previous) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = vectors.row(i);
      double* s = sums.data() + a.ids[i] * dim;
      for (std::size_t c = 0; c < dim; ++c) s[c] += row[c];
      ++counts[a.ids[i]];
    }

    std::vector<std::size_t> by_distance;  // farthest first, built lazily
    std::size_t next_far = 0;
    for (std::size_t c = 0; c < k; ++c) {
      auto dst = centroids.row(c);
      bool ok = counts[c] > 0;
      if (ok) {
        const double* s = sums.data() + c * dim;
        for (std::size_t j = 0; j < dim; ++j) dst[j] = static_cast<float>(s[j] / static_cast<double>(counts[c]));
        ok = normalize(dst);
      }
      if (!ok) {
        if (by_distance.empty()) {
          by_distance.resize(n);
          for (std::size_t i = 0; i < n; ++i) by_distance[i] = i;
          std::stable_sort(by_distance.begin(), by_distance.end(),
                           [&](std::size_t x, std::size_t y) { return a.best[x] < a.best[y]; });
        }
        const auto src = vectors.row(by_distance[next_far++ % n]);
        std::copy(src.begin(), src.end(), dst.begin());
      }
    }
    previous = std::move(a.ids);
  }
  return centroids;
}

}  // namespace latebench
