#include "latebench/ivf_index.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "latebench/kernels.hpp"
#include "latebench/kmeans.hpp"

namespace latebench {

IvfConfig IvfConfig::large_scale() {
  IvfConfig c;
  c.nlist = 4096;
  c.nprobe = 128;
  return c;
}

void IvfConfig::validate() const {
  if (nlist == 0) fail(ErrorCode::kInvalidArgument, "nlist must be >= 1");
  if (nprobe == 0 || nprobe > nlist) {
    fail(ErrorCode::kInvalidArgument,
         "nprobe must lie in [1, nlist=" + std::to_string(nlist) + "], got " + std::to_string(nprobe));
  }
  if (per_token_candidates == 0) fail(ErrorCode::kInvalidArgument, "per_token_candidates must be >= 1");
}

IvfIndex IvfIndex::build(std::shared_ptr<const Corpus> corpus, const IvfConfig& config) {
  if (!corpus) fail(ErrorCode::kEmptyCorpus, "IVF build needs a corpus");
  config.validate();
  const std::size_t total = corpus->manifest().total_vectors;
  if (total < config.nlist) {
    fail(ErrorCode::kTooFewVectors,
         "nlist=" + std::to_string(config.nlist) + " exceeds the corpus vector count " + std::to_string(total));
  }
  const TokenMatrix vectors = corpus->stacked();
  TokenMatrix centroids = train_kmeans(vectors, config.nlist, config.kmeans_iters, config.seed);
  std::vector<std::uint32_t> assignment = assign_nearest(centroids, vectors);
  return IvfIndex(std::move(corpus), config, std::move(centroids), std::move(assignment));
}

IvfIndex::IvfIndex(std::shared_ptr<const Corpus> corpus, const IvfConfig& config, TokenMatrix centroids,
                   std::vector<std::uint32_t> assignment)
    : corpus_(std::move(corpus)),
      config_(config),
      centroids_(std::move(centroids)),
      assignment_(std::move(assignment)) {
  if (!corpus_) fail(ErrorCode::kEmptyCorpus, "IVF index needs a corpus");
  config_.validate();
  if (centroids_.rows() != config_.nlist) {
    fail(ErrorCode::kInvalidArgument, "expected " + std::to_string(config_.nlist) + " centroids, got " +
                                          std::to_string(centroids_.rows()));
  }
  if (centroids_.dim() != corpus_->dim()) fail(ErrorCode::kDimensionMismatch, "centroid dim differs from corpus");
  if (assignment_.size() != corpus_->manifest().total_vectors) {
    fail(ErrorCode::kInvalidArgument, "assignment covers " + std::to_string(assignment_.size()) +
                                          " vectors, corpus has " +
                                          std::to_string(corpus_->manifest().total_vectors));
  }
  if (assign_nearest(centroids_, corpus_->stacked()) != assignment_) {
    fail(ErrorCode::kInvalidArgument, "list assignment is not the argmax-centroid assignment");
  }
  build_lists();
}

void IvfIndex::build_lists() {
  lists_.assign(config_.nlist, {});
  list_vectors_.assign(config_.nlist, {});
  const auto& offsets = corpus_->row_offsets();
  for (std::size_t d = 0; d < corpus_->size(); ++d) {
    const TokenMatrix& m = corpus_->doc(d);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const std::uint32_t list = assignment_[offsets[d] + r];
      lists_[list].push_back({static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(r)});
      const auto row = m.row(r);
      list_vectors_[list].insert(list_vectors_[list].end(), row.begin(), row.end());
    }
  }
}

std::vector<std::size_t> IvfIndex::candidates(const TokenMatrix& query, const IvfSearchParams& params) const {
  if (query.dim() != dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "query dim " + std::to_string(query.dim()) + " vs index dim " + std::to_string(dim()));
  }
  IvfConfig effective = config_;
  if (params.nprobe) effective.nprobe = *params.nprobe;
  if (params.per_token_candidates) effective.per_token_candidates = *params.per_token_candidates;
  effective.validate();

  const std::size_t nlist = config_.nlist;
  std::vector<char> mark(corpus_->size(), 0);
  std::vector<float> centroid_scores(nlist);
  std::vector<std::uint32_t> order(nlist);
  std::vector<float> scores;
  std::vector<std::uint32_t> positions;

  for (std::size_t i = 0; i < query.rows(); ++i) {
    const auto q = query.row(i);
    dot_rows(q, centroids_.data().data(), nlist, dim(), centroid_scores.data());
    std::iota(order.begin(), order.end(), 0u);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(effective.nprobe), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                        if (centroid_scores[a] != centroid_scores[b]) return centroid_scores[a] > centroid_scores[b];
                        return a < b;
                      });
    for (std::size_t p = 0; p < effective.nprobe; ++p) {
      const std::uint32_t l = order[p];
      const auto& entries = lists_[l];
      if (entries.size() <= effective.per_token_candidates) {
        for (const Entry& e : entries) mark[e.doc] = 1;
        continue;
      }
      scores.resize(entries.size());
      dot_rows(q, list_vectors_[l].data(), entries.size(), dim(), scores.data());
      positions.resize(entries.size());
      std::iota(positions.begin(), positions.end(), 0u);
      const auto cap = static_cast<std::ptrdiff_t>(effective.per_token_candidates);
      std::nth_element(positions.begin(), positions.begin() + cap - 1, positions.end(),
                       [&](std::uint32_t a, std::uint32_t b) {
                         if (scores[a] != scores[b]) return scores[a] > scores[b];
                         return a < b;
                       });
      for (std::ptrdiff_t j = 0; j < cap; ++j) mark[entries[positions[j]].doc] = 1;
    }
  }

  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < mark.size(); ++d) {
    if (mark[d]) out.push_back(d);
  }
  return out;
}

RankedList IvfIndex::search(const TokenMatrix& query, std::size_t k, const IvfSearchParams& params,
                            std::string query_id) const {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  const std::vector<std::size_t> cands = candidates(query, params);
  std::vector<OrdinalScore> scored;
  scored.reserve(cands.size());
  for (std::size_t d : cands) scored.push_back({d, maxsim_score(query, corpus_->doc(d))});
  return rank_ordinals(*corpus_, std::move(query_id), std::move(scored), k);
}

}  // namespace latebench
