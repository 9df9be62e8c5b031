#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "latebench/metrics.hpp"
#include "latebench/plaid_index.hpp"

namespace latebench {

struct CoverageReport {
  std::vector<std::string> doc_ids;        // sampled documents, corpus order
  std::vector<std::size_t> unique_counts;  // distinct centroids per sampled doc
  std::vector<std::size_t> row_counts;
  double mean_unique = 0.0;
  double median_unique = 0.0;
  std::size_t min_unique = 0;
  std::size_t max_unique = 0;
  double mean_rows = 0.0;
  double coverage_fraction = 0.0;  // mean_unique / mean_rows
  std::size_t sample_size = 0;

  std::string to_tsv() const;
};

inline constexpr std::size_t kDefaultCoverageSample = 5000;

/// Distinct-centroid footprint of a seeded sample of indexed documents.
CoverageReport centroid_coverage(const PlaidIndex& index, std::size_t sample, std::uint64_t seed);

/// Same, for an external corpus assigned to the index's centroids.
CoverageReport centroid_coverage(const PlaidIndex& index, const Corpus& corpus, std::size_t sample,
                                 std::uint64_t seed);

/// Footprint summary from explicit per-doc code sequences (all docs used).
CoverageReport coverage_from_codes(const std::vector<std::string>& doc_ids,
                                   const std::vector<std::vector<std::uint32_t>>& codes);

struct AblationRow {
  std::size_t length = 0;
  double mrr_at_10 = 0.0;
  double recall_at_1000 = 0.0;
  double ndcg_at_10 = 0.0;
};

struct AblationTable {
  std::vector<AblationRow> rows;
  std::string to_tsv() const;
};

/// Evaluates the retriever with every query truncated to its first L rows,
/// for each L in `lengths` (strictly increasing).
AblationTable truncation_ablation(const Retriever& retriever, const Corpus& queries, const Qrels& qrels,
                                  const std::vector<std::size_t>& lengths, std::size_t k);

struct GridRow {
  std::size_t ncells = 0;
  double threshold = 0.0;
  double mrr_at_10 = 0.0;
  double recall_at_1000 = 0.0;
  double ndcg_at_10 = 0.0;
  double recall_at_k = 0.0;  // Recall at the search depth
  bool operator==(const GridRow&) const = default;
};

struct GridResult {
  std::size_t ndocs = 0;
  std::size_t k = 0;
  std::vector<GridRow> rows;  // sorted by (threshold, ncells)
  std::string to_tsv() const;
};

GridResult grid_search(const PlaidIndex& index, const Corpus& queries, const Qrels& qrels,
                       const std::vector<std::size_t>& ncells_set, const std::vector<double>& threshold_set,
                       std::size_t ndocs, std::size_t k);

struct AgreementReport {
  std::size_t k = 0;
  std::vector<std::string> query_ids;  // shared queries
  std::vector<double> overlap;         // Jaccard of top-k doc sets
  double mean_overlap = 0.0;
  std::vector<MetricSpec> specs;       // MRR@10, Recall@1000, nDCG@10
  std::vector<double> metric_a;
  std::vector<double> metric_b;
  std::vector<double> delta;           // a - b

  std::string to_tsv() const;
};

AgreementReport compare_runs(const Run& a, const Run& b, const Qrels& qrels, std::size_t k);

/// Recall of `approx` against `exact` top-k doc sets, averaged over the
/// queries of `exact`.
double recall_vs_oracle(const Run& approx, const Run& exact, std::size_t k);

}  // namespace latebench
