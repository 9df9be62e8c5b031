#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "latebench/corpus.hpp"

namespace latebench {

struct IvfConfig {
  std::size_t nlist = 64;
  std::size_t nprobe = 8;
  std::size_t per_token_candidates = 256;
  std::size_t kmeans_iters = 20;
  std::uint64_t seed = 42;

  /// nlist=4096, nprobe=128: the large-collection setting.
  static IvfConfig large_scale();

  void validate() const;
  bool operator==(const IvfConfig&) const = default;
};

struct IvfSearchParams {
  std::optional<std::size_t> nprobe;
  std::optional<std::size_t> per_token_candidates;
};

/// Token-level inverted file over a corpus.
///
/// Search probes, per query row, the `nprobe` nearest lists; within each
/// probed list it keeps the `per_token_candidates` best-matching token
/// vectors and unions their source documents. Candidates are rescored with
/// exact MaxSim, so only candidate generation is approximate. Because the
/// cap is applied per list, the candidate set only grows with nprobe.
class IvfIndex final : public Retriever {
 public:
  static IvfIndex build(std::shared_ptr<const Corpus> corpus, const IvfConfig& config);

  /// Reassembles an index from trained centroids and per-vector list ids
  /// (the serialized form). Validates shapes and the argmax assignment.
  IvfIndex(std::shared_ptr<const Corpus> corpus, const IvfConfig& config, TokenMatrix centroids,
           std::vector<std::uint32_t> assignment);

  const IvfConfig& config() const noexcept { return config_; }
  const Corpus& corpus() const noexcept { return *corpus_; }
  const std::shared_ptr<const Corpus>& shared_corpus() const noexcept { return corpus_; }
  const TokenMatrix& centroids() const noexcept { return centroids_; }
  const std::vector<std::uint32_t>& assignment() const noexcept { return assignment_; }

  std::size_t dim() const noexcept override { return centroids_.dim(); }
  std::size_t list_size(std::size_t list) const { return lists_.at(list).size(); }

  struct Entry {
    std::uint32_t doc;
    std::uint32_t row;
  };
  const std::vector<Entry>& list(std::size_t list) const { return lists_.at(list); }

  /// Sorted candidate document ordinals for a query.
  std::vector<std::size_t> candidates(const TokenMatrix& query, const IvfSearchParams& params = {}) const;

  RankedList search(const TokenMatrix& query, std::size_t k, const IvfSearchParams& params = {},
                    std::string query_id = {}) const;

  RankedList retrieve(const std::string& query_id, const TokenMatrix& query,
                      std::size_t k) const override {
    return search(query, k, {}, query_id);
  }

 private:
  void build_lists();

  std::shared_ptr<const Corpus> corpus_;
  IvfConfig config_;
  TokenMatrix centroids_;
  std::vector<std::uint32_t> assignment_;
  std::vector<std::vector<Entry>> lists_;
  std::vector<std::vector<float>> list_vectors_;  // contiguous copies for scanning
};

/// Retriever adapter that applies fixed search overrides.
class IvfRetriever final : public Retriever {
 public:
  IvfRetriever(std::shared_ptr<const IvfIndex> index, IvfSearchParams params)
      : index_(std::move(index)), params_(params) {}

  std::size_t dim() const noexcept override { return index_->dim(); }
  RankedList retrieve(const std::string& query_id, const TokenMatrix& query,
                      std::size_t k) const override {
    return index_->search(query, k, params_, query_id);
  }

 private:
  std::shared_ptr<const IvfIndex> index_;
  IvfSearchParams params_;
};

}  // namespace latebench
