#include "latebench/plaid_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "latebench/kernels.hpp"
#include "latebench/kmeans.hpp"

namespace latebench {

PlaidConfig PlaidConfig::large_scale() {
  PlaidConfig c;
  c.num_centroids = 32768;
  return c;
}

void PlaidConfig::validate() const {
  if (num_centroids == 0) fail(ErrorCode::kInvalidArgument, "num_centroids must be >= 1");
  if (ncells == 0 || ncells > num_centroids) {
    fail(ErrorCode::kInvalidArgument, "ncells must lie in [1, num_centroids=" + std::to_string(num_centroids) +
                                          "], got " + std::to_string(ncells));
  }
  if (!(centroid_score_threshold >= -1.0 && centroid_score_threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "centroid_score_threshold must lie in [-1, 1]");
  }
  if (ndocs == 0) fail(ErrorCode::kInvalidArgument, "ndocs must be >= 1");
  if (residual_bits != 0) check_residual_bits(residual_bits);
}

StorageReport storage_report(std::size_t vectors, std::size_t dim, std::size_t num_centroids,
                             unsigned residual_bits) {
  StorageReport r;
  r.vectors = vectors;
  r.raw_float32_bytes = vectors * dim * 4;
  r.raw_float16_bytes = vectors * dim * 2;
  const std::size_t per_vector =
      4 + (residual_bits > 0 ? packed_residual_bytes(dim, residual_bits) + 4 : dim * 4);
  r.compressed_bytes = vectors * per_vector;
  r.centroid_bytes = num_centroids * dim * 4;
  r.ratio = r.compressed_bytes ? static_cast<double>(r.raw_float16_bytes) / static_cast<double>(r.compressed_bytes)
                               : 0.0;
  return r;
}

PlaidIndex PlaidIndex::build(std::shared_ptr<const Corpus> corpus, const PlaidConfig& config) {
  if (!corpus) fail(ErrorCode::kEmptyCorpus, "PLAID build needs a corpus");
  config.validate();
  const std::size_t total = corpus->manifest().total_vectors;
  if (total < config.num_centroids) {
    fail(ErrorCode::kTooFewVectors, "num_centroids=" + std::to_string(config.num_centroids) +
                                        " exceeds the corpus vector count " + std::to_string(total));
  }
  const TokenMatrix vectors = corpus->stacked();
  TokenMatrix centroids = train_kmeans(vectors, config.num_centroids, config.kmeans_iters, config.seed);
  std::vector<std::uint32_t> codes = assign_nearest(centroids, vectors);

  std::vector<ResidualCode> residuals;
  if (config.residual_bits > 0) {
    residuals.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
      residuals.push_back(encode_residual(vectors.row(i), centroids.row(codes[i]), config.residual_bits));
    }
  }
  std::vector<std::size_t> rows;
  rows.reserve(corpus->size());
  for (const auto& d : corpus->docs()) rows.push_back(d.rows());
  std::vector<std::string> ids = corpus->ids();
  return PlaidIndex(config, std::move(centroids), std::move(ids), std::move(rows), std::move(codes),
                    std::move(residuals), std::move(corpus));
}

PlaidIndex::PlaidIndex(const PlaidConfig& config, TokenMatrix centroids, std::vector<std::string> doc_ids,
                       std::vector<std::size_t> doc_rows, std::vector<std::uint32_t> codes,
                       std::vector<ResidualCode> residuals, std::shared_ptr<const Corpus> corpus)
    : config_(config),
      centroids_(std::move(centroids)),
      doc_ids_(std::move(doc_ids)),
      codes_(std::move(codes)),
      residuals_(std::move(residuals)),
      corpus_(std::move(corpus)) {
  config_.validate();
  if (doc_ids_.empty()) fail(ErrorCode::kEmptyIndex, "index holds no documents");
  if (centroids_.rows() != config_.num_centroids) {
    fail(ErrorCode::kInvalidArgument, "expected " + std::to_string(config_.num_centroids) + " centroids, got " +
                                          std::to_string(centroids_.rows()));
  }
  if (doc_rows.size() != doc_ids_.size()) fail(ErrorCode::kInvalidArgument, "doc id / row count length mismatch");
  row_offsets_.reserve(doc_rows.size() + 1);
  row_offsets_.push_back(0);
  for (std::size_t r : doc_rows) {
    if (r == 0) fail(ErrorCode::kEmptyMatrix, "indexed document with no rows");
    row_offsets_.push_back(row_offsets_.back() + r);
  }
  if (row_offsets_.back() != codes_.size()) {
    fail(ErrorCode::kInvalidArgument, "code count " + std::to_string(codes_.size()) + " differs from row total " +
                                          std::to_string(row_offsets_.back()));
  }
  for (std::uint32_t c : codes_) {
    if (c >= config_.num_centroids) fail(ErrorCode::kInvalidArgument, "centroid id out of range");
  }
  if (config_.residual_bits > 0) {
    if (residuals_.size() != codes_.size()) fail(ErrorCode::kInvalidArgument, "one residual code per vector required");
    const std::size_t bytes = packed_residual_bytes(centroids_.dim(), config_.residual_bits);
    for (const auto& r : residuals_) {
      if (r.packed.size() != bytes) fail(ErrorCode::kInvalidArgument, "residual code has the wrong length");
    }
  } else if (!residuals_.empty()) {
    fail(ErrorCode::kInvalidArgument, "residual codes present with residual_bits=0");
  }
  if (corpus_) {
    if (corpus_->ids() != doc_ids_) fail(ErrorCode::kInvalidArgument, "corpus ids differ from index ids");
    if (corpus_->dim() != centroids_.dim()) fail(ErrorCode::kDimensionMismatch, "centroid dim differs from corpus");
    if (corpus_->row_offsets() != row_offsets_) fail(ErrorCode::kInvalidArgument, "corpus row counts differ");
    if (assign_nearest(centroids_, corpus_->stacked()) != codes_) {
      fail(ErrorCode::kInvalidArgument, "codes are not the argmax-centroid assignment");
    }
  } else if (config_.residual_bits == 0) {
    fail(ErrorCode::kInvalidArgument, "an index without residual codes needs its corpus");
  }
  finish_setup();
}

void PlaidIndex::finish_setup() {
  inverted_.assign(config_.num_centroids, {});
  std::vector<std::uint32_t> seen(config_.num_centroids, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    for (std::size_t i = row_offsets_[d]; i < row_offsets_[d + 1]; ++i) {
      const std::uint32_t c = codes_[i];
      if (seen[c] != d) {
        seen[c] = static_cast<std::uint32_t>(d);
        inverted_[c].push_back(static_cast<std::uint32_t>(d));
      }
    }
  }
  if (config_.residual_bits > 0) {
    const std::size_t dim = centroids_.dim();
    decoded_.clear();
    decoded_.reserve(doc_ids_.size());
    for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
      const std::size_t rows = row_offsets_[d + 1] - row_offsets_[d];
      TokenMatrix m(rows, dim);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = row_offsets_[d] + r;
        const auto v = decode_residual(residuals_[i], centroids_.row(codes_[i]), config_.residual_bits);
        std::copy(v.begin(), v.end(), m.row(r).begin());
      }
      decoded_.push_back(std::move(m));
    }
  }
}

std::size_t PlaidIndex::doc_rows(std::size_t doc) const {
  if (doc >= doc_ids_.size()) fail(ErrorCode::kUnknownDoc, "doc ordinal " + std::to_string(doc) + " not in index");
  return row_offsets_[doc + 1] - row_offsets_[doc];
}

std::vector<std::uint32_t> PlaidIndex::centroid_codes(std::size_t doc) const {
  doc_rows(doc);
  return {codes_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[doc]),
          codes_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[doc + 1])};
}

std::vector<std::vector<std::uint32_t>> PlaidIndex::assign_codes(const Corpus& corpus) const {
  const std::vector<std::uint32_t> flat = assign_nearest(centroids_, corpus.stacked());
  const auto& offsets = corpus.row_offsets();
  std::vector<std::vector<std::uint32_t>> out(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    out[d].assign(flat.begin() + static_cast<std::ptrdiff_t>(offsets[d]),
                  flat.begin() + static_cast<std::ptrdiff_t>(offsets[d + 1]));
  }
  return out;
}

TokenMatrix PlaidIndex::doc_vectors(std::size_t doc) const {
  doc_rows(doc);
  if (config_.residual_bits > 0) return decoded_[doc];
  return corpus_->doc(doc);
}

std::vector<float> PlaidIndex::centroid_scores(const TokenMatrix& query) const {
  if (query.dim() != dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "query dim " + std::to_string(query.dim()) + " vs index dim " + std::to_string(dim()));
  }
  const std::size_t k = config_.num_centroids;
  std::vector<float> scores(query.rows() * k);
  for (std::size_t i = 0; i < query.rows(); ++i) {
    dot_rows(query.row(i), centroids_.data().data(), k, dim(), scores.data() + i * k);
  }
  return scores;
}

double PlaidIndex::approx_from_scores(const std::vector<float>& scores, std::size_t query_rows,
                                      std::size_t doc) const {
  const std::size_t k = config_.num_centroids;
  double total = 0.0;
  for (std::size_t i = 0; i < query_rows; ++i) {
    const float* row = scores.data() + i * k;
    float best = -std::numeric_limits<float>::infinity();
    for (std::size_t j = row_offsets_[doc]; j < row_offsets_[doc + 1]; ++j) best = std::max(best, row[codes_[j]]);
    total += best;
  }
  return total;
}

double PlaidIndex::approx_doc_score(const TokenMatrix& query, std::size_t doc) const {
  doc_rows(doc);
  const std::vector<float> scores = centroid_scores(query);
  return approx_from_scores(scores, query.rows(), doc);
}

PlaidIndex::Resolved PlaidIndex::resolve(const PlaidSearchParams& params) const {
  Resolved r{params.ncells.value_or(config_.ncells),
             params.centroid_score_threshold.value_or(config_.centroid_score_threshold),
             params.ndocs.value_or(config_.ndocs)};
  if (r.ncells == 0 || r.ncells > config_.num_centroids) {
    fail(ErrorCode::kInvalidArgument, "ncells must lie in [1, " + std::to_string(config_.num_centroids) +
                                          "], got " + std::to_string(r.ncells));
  }
  if (!std::isfinite(r.threshold)) fail(ErrorCode::kInvalidArgument, "threshold must be finite");
  return r;
}

std::vector<std::size_t> PlaidIndex::gather(const std::vector<float>& scores, std::size_t query_rows,
                                            const Resolved& p, PlaidTrace* trace) const {
  const std::size_t k = config_.num_centroids;
  std::vector<char> mark(doc_ids_.size(), 0);
  std::vector<std::uint32_t> order(k);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < query_rows; ++i) {
    const float* row = scores.data() + i * k;
    std::iota(order.begin(), order.end(), 0u);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(p.ncells), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                        if (row[a] != row[b]) return row[a] > row[b];
                        return a < b;
                      });
    for (std::size_t c = 0; c < p.ncells; ++c) {
      const std::uint32_t cell = order[c];
      if (row[cell] < p.threshold) continue;
      ++kept;
      for (std::uint32_t d : inverted_[cell]) mark[d] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < mark.size(); ++d) {
    if (mark[d]) out.push_back(d);
  }
  if (trace) {
    trace->probed = query_rows * p.ncells;
    trace->kept = kept;
    trace->candidates = out.size();
  }
  return out;
}

std::vector<std::size_t> PlaidIndex::candidates(const TokenMatrix& query, const PlaidSearchParams& params) const {
  const Resolved p = resolve(params);
  return gather(centroid_scores(query), query.rows(), p, nullptr);
}

RankedList PlaidIndex::search(const TokenMatrix& query, std::size_t k, const PlaidSearchParams& params,
                              std::string query_id, PlaidTrace* trace) const {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  const Resolved p = resolve(params);
  if (p.ndocs < k) {
    fail(ErrorCode::kNDocsTooSmall, "ndocs=" + std::to_string(p.ndocs) + " is below k=" + std::to_string(k));
  }
  const std::vector<float> scores = centroid_scores(query);
  const std::vector<std::size_t> cands = gather(scores, query.rows(), p, trace);

  const auto before = [&](const OrdinalScore& a, const OrdinalScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return doc_ids_[a.doc] < doc_ids_[b.doc];
  };

  std::vector<OrdinalScore> approx;
  approx.reserve(cands.size());
  for (std::size_t d : cands) approx.push_back({d, approx_from_scores(scores, query.rows(), d)});
  const std::size_t survivors = std::min(p.ndocs, approx.size());
  std::partial_sort(approx.begin(), approx.begin() + static_cast<std::ptrdiff_t>(survivors), approx.end(), before);
  approx.resize(survivors);
  if (trace) trace->survivors = survivors;

  std::vector<OrdinalScore> exact;
  exact.reserve(survivors);
  for (const auto& a : approx) {
    const TokenMatrix& vectors = config_.residual_bits > 0 ? decoded_[a.doc] : corpus_->doc(a.doc);
    exact.push_back({a.doc, maxsim_score(query, vectors)});
  }
  const std::size_t keep = std::min(k, exact.size());
  std::partial_sort(exact.begin(), exact.begin() + static_cast<std::ptrdiff_t>(keep), exact.end(), before);
  RankedList list{std::move(query_id), {}};
  list.docs.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) list.docs.push_back({doc_ids_[exact[i].doc], exact[i].score});
  return list;
}

StorageReport PlaidIndex::storage() const {
  return storage_report(codes_.size(), dim(), config_.num_centroids, config_.residual_bits);
}

}  // namespace latebench
