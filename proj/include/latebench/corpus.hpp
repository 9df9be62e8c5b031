#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "latebench/token_matrix.hpp"

namespace latebench {

enum class Dtype { kFloat32, kFloat16 };
enum class Pooling { kNone, kFixed };

std::string_view dtype_name(Dtype d) noexcept;
std::string_view pooling_name(Pooling p) noexcept;
std::size_t dtype_bytes(Dtype d) noexcept;

inline constexpr std::size_t kDefaultSlots = 32;

struct CorpusManifest {
  std::size_t dim = 0;
  Dtype dtype = Dtype::kFloat32;
  Pooling pooling = Pooling::kNone;
  std::size_t slots = 0;  // C; only meaningful with Pooling::kFixed
  std::size_t doc_count = 0;
  std::size_t total_vectors = 0;

  bool operator==(const CorpusManifest&) const = default;
};

struct CorpusOptions {
  Dtype dtype = Dtype::kFloat32;
  Pooling pooling = Pooling::kNone;
  std::size_t slots = 0;
};

/// Ordered, immutable collection of documents keyed by unique string ids.
/// Also used for query sets (ids are then query ids).
class Corpus {
 public:
  /// Validates every invariant (unique non-empty whitespace-free ids,
  /// matching dims, unit-norm rows, fixed slot count when pooled).
  Corpus(std::vector<std::string> ids, std::vector<TokenMatrix> docs, CorpusOptions options = {});

  const CorpusManifest& manifest() const noexcept { return manifest_; }
  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return manifest_.dim; }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const TokenMatrix& doc(std::size_t i) const { return docs_.at(i); }
  const std::vector<TokenMatrix>& docs() const noexcept { return docs_; }

  std::optional<std::size_t> find(std::string_view id) const;

  /// Offset of doc i's first row in the flattened token sequence;
  /// row_offsets()[size()] == total_vectors.
  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }

  /// All token rows stacked in document order.
  TokenMatrix stacked() const;

  bool operator==(const Corpus& other) const;

 private:
  CorpusManifest manifest_;
  std::vector<std::string> ids_;
  std::vector<TokenMatrix> docs_;
  std::vector<std::size_t> row_offsets_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Unit-norm tolerance used when validating rows of a given storage dtype.
double norm_tolerance(Dtype d) noexcept;

/// Applies pool_fixed to every document; the result is marked Pooling::kFixed.
Corpus pool_corpus(const Corpus& corpus, std::size_t slots);

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

/// Ranking contract: score descending, ties by doc_id ascending.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

struct RankedList {
  std::string query_id;
  std::vector<ScoredDoc> docs;

  bool operator==(const RankedList&) const = default;
};

/// Sorts `docs` under the ranking contract and truncates to k.
void sort_and_truncate(std::vector<ScoredDoc>& docs, std::size_t k);

/// Scored ordinals into a corpus, ranked and converted to a RankedList.
struct OrdinalScore {
  std::size_t doc = 0;
  double score = 0.0;
};
RankedList rank_ordinals(const Corpus& corpus, std::string query_id,
                         std::vector<OrdinalScore> scored, std::size_t k);

/// Anything that can answer a top-k query over a corpus.
class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual std::size_t dim() const noexcept = 0;
  virtual RankedList retrieve(const std::string& query_id, const TokenMatrix& query,
                              std::size_t k) const = 0;
};

/// Brute-force MaxSim over every document.
RankedList exact_search(const Corpus& corpus, const TokenMatrix& query, std::size_t k,
                        std::string query_id = {});

class ExactRetriever final : public Retriever {
 public:
  explicit ExactRetriever(std::shared_ptr<const Corpus> corpus);

  std::size_t dim() const noexcept override { return corpus_->dim(); }
  RankedList retrieve(const std::string& query_id, const TokenMatrix& query,
                      std::size_t k) const override;

  const Corpus& corpus() const noexcept { return *corpus_; }
  const std::shared_ptr<const Corpus>& shared_corpus() const noexcept { return corpus_; }

 private:
  std::shared_ptr<const Corpus> corpus_;
};

}  // namespace latebench
