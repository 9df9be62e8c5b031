#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "latebench/run.hpp"

namespace latebench {

/// Graded judgments: query id -> doc id -> grade (>= 0; > 0 is relevant).
class Qrels {
 public:
  /// Fails with kDuplicateJudgment if (query, doc) is already judged.
  void add(const std::string& query_id, const std::string& doc_id, int grade);

  const std::map<std::string, std::map<std::string, int>>& judgments() const noexcept {
    return judgments_;
  }
  /// Null when the query has no judgments.
  const std::map<std::string, int>* find(const std::string& query_id) const;
  std::size_t query_count() const noexcept { return judgments_.size(); }
  std::size_t size() const noexcept;

  bool operator==(const Qrels&) const = default;

 private:
  std::map<std::string, std::map<std::string, int>> judgments_;
};

enum class Metric { kMrr, kRecall, kNdcg };

struct MetricSpec {
  Metric metric = Metric::kMrr;
  std::size_t k = 10;

  /// "MRR@10", "Recall@1000", "nDCG@10" (case-insensitive on parse).
  static MetricSpec parse(std::string_view text);
  std::string name() const;

  bool operator==(const MetricSpec&) const = default;
};

struct MetricReport {
  MetricSpec spec;
  std::map<std::string, double> per_query;
  double mean = 0.0;
  std::size_t query_count = 0;
};

struct EvalOptions {
  /// Raise kQueryMissingFromQrels instead of warning when the run holds a
  /// query that has no judgments.
  bool strict = false;
};

// Every query present in the qrels is evaluated; those missing from the run
// score 0. Unjudged retrieved documents count as non-relevant.
MetricReport mrr_at_k(const Run& run, const Qrels& qrels, std::size_t k, EvalOptions options = {});
MetricReport recall_at_k(const Run& run, const Qrels& qrels, std::size_t k, EvalOptions options = {});
MetricReport ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k, EvalOptions options = {});
MetricReport compute_metric(const Run& run, const Qrels& qrels, const MetricSpec& spec,
                            EvalOptions options = {});

struct EvaluationReport {
  std::vector<MetricReport> metrics;
  std::vector<std::string> query_ids;  // sorted union of evaluated queries

  const MetricReport& at(const MetricSpec& spec) const;
  /// Per-query rows then an "all" row; tab-separated with a header line.
  std::string to_tsv() const;
};

EvaluationReport evaluate_run(const Run& run, const Qrels& qrels, const std::vector<MetricSpec>& specs,
                              EvalOptions options = {});

/// MRR@10, Recall@50, Recall@1000, nDCG@10.
std::vector<MetricSpec> default_metric_specs();

}  // namespace latebench
