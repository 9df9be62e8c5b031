#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latebench/corpus.hpp"
#include "latebench/residual.hpp"

namespace latebench {

struct PlaidConfig {
  std::size_t num_centroids = 256;
  std::size_t ncells = 4;
  double centroid_score_threshold = 0.4;
  std::size_t ndocs = 4096;
  unsigned residual_bits = 0;  // 0 = off, else 1 or 2
  std::size_t kmeans_iters = 20;
  std::uint64_t seed = 42;

  /// 32768 centroids with the documented ncells=4 / 0.4 / 4096 defaults.
  static PlaidConfig large_scale();

  void validate() const;
  bool operator==(const PlaidConfig&) const = default;
};

struct PlaidSearchParams {
  std::optional<std::size_t> ncells;
  std::optional<double> centroid_score_threshold;
  std::optional<std::size_t> ndocs;
};

/// Byte accounting for the stored vectors. compressed_bytes counts the
/// per-vector payload (4-byte centroid id, plus packed residual and 4-byte
/// scale when residuals are on, else the float32 vector). The shared
/// centroid table is reported separately and excluded from ratio.
struct StorageReport {
  std::size_t vectors = 0;
  std::size_t raw_float32_bytes = 0;
  std::size_t raw_float16_bytes = 0;
  std::size_t compressed_bytes = 0;
  std::size_t centroid_bytes = 0;
  double ratio = 0.0;  // raw_float16_bytes / compressed_bytes
};

StorageReport storage_report(std::size_t vectors, std::size_t dim, std::size_t num_centroids,
                             unsigned residual_bits);

/// Per-stage sizes of one search, for diagnostics.
struct PlaidTrace {
  std::size_t probed = 0;         // (query row, centroid) pairs after top-ncells
  std::size_t kept = 0;           // pairs surviving the score threshold
  std::size_t candidates = 0;     // documents reached through kept centroids
  std::size_t survivors = 0;      // documents passed to exact rescoring
};

/// Centroid-interaction index with staged candidate generation.
///
/// Stage 1 keeps each query row's top-ncells centroids and drops those
/// scoring below the absolute cosine threshold. Stage 2 unions the
/// surviving centroids' document lists. Stage 3 scores candidates with
/// MaxSim against their centroid-substituted vectors and keeps the top
/// ndocs. Stage 4 rescores survivors with full vectors (decoded residuals
/// when residual_bits > 0).
class PlaidIndex final : public Retriever {
 public:
  static PlaidIndex build(std::shared_ptr<const Corpus> corpus, const PlaidConfig& config);

  /// Reassembles a serialized index. `corpus` may be null when residual
  /// codes are present; doc ids and row counts then come from `doc_ids` /
  /// `doc_rows`.
  PlaidIndex(const PlaidConfig& config, TokenMatrix centroids, std::vector<std::string> doc_ids,
             std::vector<std::size_t> doc_rows, std::vector<std::uint32_t> codes,
             std::vector<ResidualCode> residuals, std::shared_ptr<const Corpus> corpus);

  const PlaidConfig& config() const noexcept { return config_; }
  const TokenMatrix& centroids() const noexcept { return centroids_; }
  std::size_t dim() const noexcept override { return centroids_.dim(); }
  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  std::size_t total_vectors() const noexcept { return codes_.size(); }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  std::size_t doc_rows(std::size_t doc) const;

  /// Null when the index was loaded without raw embeddings.
  const std::shared_ptr<const Corpus>& shared_corpus() const noexcept { return corpus_; }
  bool has_residuals() const noexcept { return config_.residual_bits > 0; }

  const std::vector<std::uint32_t>& codes() const noexcept { return codes_; }
  const std::vector<ResidualCode>& residuals() const noexcept { return residuals_; }

  /// Stored centroid id per row of `doc`, in row order.
  std::vector<std::uint32_t> centroid_codes(std::size_t doc) const;

  /// Sorted document ordinals that hold at least one vector in `centroid`.
  const std::vector<std::uint32_t>& docs_in_centroid(std::size_t centroid) const {
    return inverted_.at(centroid);
  }

  /// Assigns arbitrary documents to this index's centroids.
  std::vector<std::vector<std::uint32_t>> assign_codes(const Corpus& corpus) const;

  /// MaxSim of `query` against doc's centroid-substituted vectors.
  double approx_doc_score(const TokenMatrix& query, std::size_t doc) const;

  /// Full-precision (or residual-decoded) vectors of a document.
  TokenMatrix doc_vectors(std::size_t doc) const;

  /// Sorted stage-2 candidate ordinals.
  std::vector<std::size_t> candidates(const TokenMatrix& query, const PlaidSearchParams& params = {}) const;

  RankedList search(const TokenMatrix& query, std::size_t k, const PlaidSearchParams& params = {},
                    std::string query_id = {}, PlaidTrace* trace = nullptr) const;

  RankedList retrieve(const std::string& query_id, const TokenMatrix& query,
                      std::size_t k) const override {
    return search(query, k, {}, query_id);
  }

  StorageReport storage() const;

 private:
  struct Resolved {
    std::size_t ncells;
    double threshold;
    std::size_t ndocs;
  };
  Resolved resolve(const PlaidSearchParams& params) const;
  std::vector<float> centroid_scores(const TokenMatrix& query) const;
  std::vector<std::size_t> gather(const std::vector<float>& scores, std::size_t query_rows,
                                  const Resolved& p, PlaidTrace* trace) const;
  double approx_from_scores(const std::vector<float>& scores, std::size_t query_rows,
                            std::size_t doc) const;
  void finish_setup();

  PlaidConfig config_;
  TokenMatrix centroids_;
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::uint32_t> codes_;
  std::vector<ResidualCode> residuals_;
  std::vector<std::vector<std::uint32_t>> inverted_;
  std::shared_ptr<const Corpus> corpus_;
  std::vector<TokenMatrix> decoded_;  // per-doc residual reconstructions
};

class PlaidRetriever final : public Retriever {
 public:
  PlaidRetriever(std::shared_ptr<const PlaidIndex> index, PlaidSearchParams params)
      : index_(std::move(index)), params_(params) {}

  std::size_t dim() const noexcept override { return index_->dim(); }
  RankedList retrieve(const std::string& query_id, const TokenMatrix& query,
                      std::size_t k) const override {
    return index_->search(query, k, params_, query_id);
  }

 private:
  std::shared_ptr<const PlaidIndex> index_;
  PlaidSearchParams params_;
};

}  // namespace latebench
