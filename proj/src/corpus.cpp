#include "latebench/corpus.hpp"

#include <algorithm>
#include <string>

namespace latebench {

std::string_view dtype_name(Dtype d) noexcept { return d == Dtype::kFloat16 ? "float16" : "float32"; }

std::string_view pooling_name(Pooling p) noexcept { return p == Pooling::kFixed ? "fixed" : "none"; }

std::size_t dtype_bytes(Dtype d) noexcept { return d == Dtype::kFloat16 ? 2 : 4; }

// Rounding every component to half precision perturbs a unit norm by up to
// ~5e-4 in the worst case, beyond the float32 tolerance.
double norm_tolerance(Dtype d) noexcept { return d == Dtype::kFloat16 ? 2e-3 : kUnitNormTolerance; }

Corpus::Corpus(std::vector<std::string> ids, std::vector<TokenMatrix> docs, CorpusOptions options)
    : ids_(std::move(ids)), docs_(std::move(docs)) {
  if (ids_.empty()) fail(ErrorCode::kEmptyCorpus, "corpus has no documents");
  if (ids_.size() != docs_.size()) {
    fail(ErrorCode::kInvalidArgument, std::to_string(ids_.size()) + " ids for " +
                                          std::to_string(docs_.size()) + " documents");
  }
  if (options.pooling == Pooling::kFixed && options.slots == 0) {
    fail(ErrorCode::kInvalidArgument, "fixed pooling needs C >= 1");
  }
  manifest_.dim = docs_.front().dim();
  manifest_.dtype = options.dtype;
  manifest_.pooling = options.pooling;
  manifest_.slots = options.pooling == Pooling::kFixed ? options.slots : 0;
  manifest_.doc_count = ids_.size();

  const double tol = norm_tolerance(options.dtype);
  row_offsets_.reserve(ids_.size() + 1);
  row_offsets_.push_back(0);
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const std::string& id = ids_[i];
    if (id.empty()) fail(ErrorCode::kInvalidArgument, "empty document id at position " + std::to_string(i));
    if (id.find_first_of(" \t\r\n") != std::string::npos) {
      fail(ErrorCode::kInvalidArgument, "document id contains whitespace: '" + id + "'");
    }
    if (!index_.emplace(id, i).second) fail(ErrorCode::kInvalidArgument, "duplicate document id '" + id + "'");
    const TokenMatrix& m = docs_[i];
    if (m.dim() != manifest_.dim) {
      fail(ErrorCode::kDimensionMismatch, "document '" + id + "' has dim " + std::to_string(m.dim()) +
                                              ", corpus dim " + std::to_string(manifest_.dim));
    }
    try {
      require_valid(m, tol);
    } catch (const Error& e) {
      fail(e.code(), "document '" + id + "': " + e.what());
    }
    if (manifest_.pooling == Pooling::kFixed && m.rows() != manifest_.slots) {
      fail(ErrorCode::kInvalidArgument, "document '" + id + "' has " + std::to_string(m.rows()) +
                                            " rows, pooled corpus requires " + std::to_string(manifest_.slots));
    }
    row_offsets_.push_back(row_offsets_.back() + m.rows());
  }
  manifest_.total_vectors = row_offsets_.back();
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenMatrix Corpus::stacked() const {
  std::vector<float> data;
  data.reserve(manifest_.total_vectors * manifest_.dim);
  for (const auto& m : docs_) data.insert(data.end(), m.data().begin(), m.data().end());
  return TokenMatrix(manifest_.total_vectors, manifest_.dim, std::move(data));
}

bool Corpus::operator==(const Corpus& other) const {
  return manifest_ == other.manifest_ && ids_ == other.ids_ && docs_ == other.docs_;
}

Corpus pool_corpus(const Corpus& corpus, std::size_t slots) {
  std::vector<TokenMatrix> pooled;
  pooled.reserve(corpus.size());
  for (const auto& d : corpus.docs()) pooled.push_back(pool_fixed(d, slots));
  return Corpus(corpus.ids(), std::move(pooled),
                {.dtype = corpus.manifest().dtype, .pooling = Pooling::kFixed, .slots = slots});
}

void sort_and_truncate(std::vector<ScoredDoc>& docs, std::size_t k) {
  const std::size_t keep = std::min(k, docs.size());
  std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(keep), docs.end(), ranks_before);
  docs.resize(keep);
}

RankedList rank_ordinals(const Corpus& corpus, std::string query_id, std::vector<OrdinalScore> scored,
                         std::size_t k) {
  const auto before = [&](const OrdinalScore& a, const OrdinalScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return corpus.id(a.doc) < corpus.id(b.doc);
  };
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), before);
  RankedList list{std::move(query_id), {}};
  list.docs.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) list.docs.push_back({corpus.id(scored[i].doc), scored[i].score});
  return list;
}

RankedList exact_search(const Corpus& corpus, const TokenMatrix& query, std::size_t k, std::string query_id) {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (query.dim() != corpus.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "query dim " + std::to_string(query.dim()) + " vs corpus dim " + std::to_string(corpus.dim()));
  }
  std::vector<OrdinalScore> scored(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) scored[d] = {d, maxsim_score(query, corpus.doc(d))};
  return rank_ordinals(corpus, std::move(query_id), std::move(scored), k);
}

ExactRetriever::ExactRetriever(std::shared_ptr<const Corpus> corpus) : corpus_(std::move(corpus)) {
  if (!corpus_) fail(ErrorCode::kEmptyCorpus, "exact retriever needs a corpus");
}

RankedList ExactRetriever::retrieve(const std::string& query_id, const TokenMatrix& query,
                                    std::size_t k) const {
  return exact_search(*corpus_, query, k, query_id);
}

}  // namespace latebench
