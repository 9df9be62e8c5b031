#include "latebench/diagnostics.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "latebench/trec_io.hpp"

namespace latebench {

namespace {

std::vector<MetricSpec> table_specs() {
  return {{Metric::kMrr, 10}, {Metric::kRecall, 1000}, {Metric::kNdcg, 10}};
}

std::vector<std::size_t> sample_ordinals(std::size_t population, std::size_t sample, std::uint64_t seed) {
  if (population == 0) fail(ErrorCode::kEmptyIndex, "no documents to sample");
  if (sample == 0) fail(ErrorCode::kInvalidArgument, "coverage sample must be >= 1");
  if (sample > population) {
    warn("coverage sample " + std::to_string(sample) + " exceeds " + std::to_string(population) +
         " documents; using all of them");
    sample = population;
  }
  std::vector<std::size_t> all(population);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> picked;
  picked.reserve(sample);
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), sample, rng);
  return picked;
}

std::size_t unique_count(std::vector<std::uint32_t> codes) {
  std::sort(codes.begin(), codes.end());
  return static_cast<std::size_t>(std::unique(codes.begin(), codes.end()) - codes.begin());
}

}  // namespace

CoverageReport coverage_from_codes(const std::vector<std::string>& doc_ids,
                                   const std::vector<std::vector<std::uint32_t>>& codes) {
  if (doc_ids.empty()) fail(ErrorCode::kEmptyIndex, "no documents for coverage");
  if (doc_ids.size() != codes.size()) fail(ErrorCode::kInvalidArgument, "one code list per document required");
  CoverageReport r;
  r.doc_ids = doc_ids;
  r.sample_size = doc_ids.size();
  double unique_sum = 0.0;
  double row_sum = 0.0;
  for (const auto& c : codes) {
    if (c.empty()) fail(ErrorCode::kEmptyMatrix, "document without vectors in coverage input");
    r.unique_counts.push_back(unique_count(c));
    r.row_counts.push_back(c.size());
    unique_sum += static_cast<double>(r.unique_counts.back());
    row_sum += static_cast<double>(c.size());
  }
  const double n = static_cast<double>(r.sample_size);
  r.mean_unique = unique_sum / n;
  r.mean_rows = row_sum / n;
  r.coverage_fraction = unique_sum / row_sum;
  std::vector<std::size_t> sorted = r.unique_counts;
  std::sort(sorted.begin(), sorted.end());
  r.min_unique = sorted.front();
  r.max_unique = sorted.back();
  const std::size_t mid = sorted.size() / 2;
  r.median_unique = sorted.size() % 2 ? static_cast<double>(sorted[mid])
                                      : (static_cast<double>(sorted[mid - 1]) + static_cast<double>(sorted[mid])) / 2.0;
  return r;
}

CoverageReport centroid_coverage(const PlaidIndex& index, std::size_t sample, std::uint64_t seed) {
  const auto picked = sample_ordinals(index.doc_count(), sample, seed);
  std::vector<std::string> ids;
  std::vector<std::vector<std::uint32_t>> codes;
  for (std::size_t d : picked) {
    ids.push_back(index.doc_ids()[d]);
    codes.push_back(index.centroid_codes(d));
  }
  return coverage_from_codes(ids, codes);
}

CoverageReport centroid_coverage(const PlaidIndex& index, const Corpus& corpus, std::size_t sample,
                                 std::uint64_t seed) {
  const auto picked = sample_ordinals(corpus.size(), sample, seed);
  const auto all_codes = index.assign_codes(corpus);
  std::vector<std::string> ids;
  std::vector<std::vector<std::uint32_t>> codes;
  for (std::size_t d : picked) {
    ids.push_back(corpus.id(d));
    codes.push_back(all_codes[d]);
  }
  return coverage_from_codes(ids, codes);
}

std::string CoverageReport::to_tsv() const {
  std::ostringstream out;
  out << "doc\trows\tunique\tfraction\n";
  for (std::size_t i = 0; i < doc_ids.size(); ++i) {
    out << doc_ids[i] << '\t' << row_counts[i] << '\t' << unique_counts[i] << '\t'
        << format_score(static_cast<double>(unique_counts[i]) / static_cast<double>(row_counts[i])) << '\n';
  }
  out << "mean\t" << format_score(mean_rows) << '\t' << format_score(mean_unique) << '\t'
      << format_score(coverage_fraction) << '\n';
  out << "median\t-\t" << format_score(median_unique) << "\t-\n";
  out << "min\t-\t" << min_unique << "\t-\n";
  out << "max\t-\t" << max_unique << "\t-\n";
  out << "sample\t-\t" << sample_size << "\t-\n";
  return out.str();
}

AblationTable truncation_ablation(const Retriever& retriever, const Corpus& queries, const Qrels& qrels,
                                  const std::vector<std::size_t>& lengths, std::size_t k) {
  if (lengths.empty()) fail(ErrorCode::kEmptyLengths, "no truncation lengths given");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] == 0) fail(ErrorCode::kInvalidArgument, "truncation lengths must be >= 1");
    if (i > 0 && lengths[i] <= lengths[i - 1]) {
      fail(ErrorCode::kInvalidArgument, "truncation lengths must be strictly increasing");
    }
  }
  const auto specs = table_specs();
  AblationTable table;
  for (std::size_t len : lengths) {
    const Run run = search_all_truncated(retriever, queries, k, len);
    const EvaluationReport rep = evaluate_run(run, qrels, specs);
    table.rows.push_back({len, rep.metrics[0].mean, rep.metrics[1].mean, rep.metrics[2].mean});
  }
  return table;
}

std::string AblationTable::to_tsv() const {
  std::ostringstream out;
  out << "length\tMRR@10\tRecall@1000\tnDCG@10\n";
  for (const auto& r : rows) {
    out << r.length << '\t' << format_score(r.mrr_at_10) << '\t' << format_score(r.recall_at_1000) << '\t'
        << format_score(r.ndcg_at_10) << '\n';
  }
  return out.str();
}

GridResult grid_search(const PlaidIndex& index, const Corpus& queries, const Qrels& qrels,
                       const std::vector<std::size_t>& ncells_set, const std::vector<double>& threshold_set,
                       std::size_t ndocs, std::size_t k) {
  if (ncells_set.empty() || threshold_set.empty()) fail(ErrorCode::kInvalidArgument, "grid sets must be non-empty");
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (ndocs < k) {
    fail(ErrorCode::kNDocsTooSmall, "ndocs=" + std::to_string(ndocs) + " is below k=" + std::to_string(k));
  }
  auto specs = table_specs();
  specs.push_back({Metric::kRecall, k});

  std::vector<std::pair<double, std::size_t>> cells;
  for (double t : threshold_set) {
    for (std::size_t nc : ncells_set) cells.emplace_back(t, nc);
  }
  std::stable_sort(cells.begin(), cells.end());

  GridResult result;
  result.ndocs = ndocs;
  result.k = k;
  auto shared = std::shared_ptr<const PlaidIndex>(&index, [](const PlaidIndex*) {});
  for (const auto& [t, nc] : cells) {
    const PlaidRetriever retriever(shared, {.ncells = nc, .centroid_score_threshold = t, .ndocs = ndocs});
    const EvaluationReport rep = evaluate_run(search_all(retriever, queries, k), qrels, specs);
    result.rows.push_back({nc, t, rep.metrics[0].mean, rep.metrics[1].mean, rep.metrics[2].mean, rep.metrics[3].mean});
  }
  return result;
}

std::string GridResult::to_tsv() const {
  std::ostringstream out;
  out << "ndocs\tncells\tthreshold\tMRR@10\tRecall@1000\tnDCG@10\tRecall@" << k << '\n';
  for (const auto& r : rows) {
    out << ndocs << '\t' << r.ncells << '\t' << format_score(r.threshold) << '\t' << format_score(r.mrr_at_10)
        << '\t' << format_score(r.recall_at_1000) << '\t' << format_score(r.ndcg_at_10) << '\t'
        << format_score(r.recall_at_k) << '\n';
  }
  return out.str();
}

namespace {

std::set<std::string> top_set(const RankedList& list, std::size_t k) {
  std::set<std::string> s;
  for (std::size_t i = 0; i < list.docs.size() && i < k; ++i) s.insert(list.docs[i].doc_id);
  return s;
}

}  // namespace

AgreementReport compare_runs(const Run& a, const Run& b, const Qrels& qrels, std::size_t k) {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  AgreementReport r;
  r.k = k;
  for (const auto& [qid, list] : a.lists) {
    const auto it = b.lists.find(qid);
    if (it == b.lists.end()) continue;
    const auto sa = top_set(list, k);
    const auto sb = top_set(it->second, k);
    std::size_t inter = 0;
    for (const auto& d : sa) inter += sb.count(d);
    const std::size_t uni = sa.size() + sb.size() - inter;
    r.query_ids.push_back(qid);
    r.overlap.push_back(uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni));
  }
  if (r.query_ids.empty()) fail(ErrorCode::kNoSharedQueries, "the two runs share no query ids");
  r.mean_overlap = std::accumulate(r.overlap.begin(), r.overlap.end(), 0.0) / static_cast<double>(r.overlap.size());

  r.specs = table_specs();
  const EvaluationReport ea = evaluate_run(a, qrels, r.specs);
  const EvaluationReport eb = evaluate_run(b, qrels, r.specs);
  for (std::size_t i = 0; i < r.specs.size(); ++i) {
    r.metric_a.push_back(ea.metrics[i].mean);
    r.metric_b.push_back(eb.metrics[i].mean);
    r.delta.push_back(r.metric_a.back() - r.metric_b.back());
  }
  return r;
}

std::string AgreementReport::to_tsv() const {
  std::ostringstream out;
  out << "query\tjaccard@" << k << '\n';
  for (std::size_t i = 0; i < query_ids.size(); ++i) out << query_ids[i] << '\t' << format_score(overlap[i]) << '\n';
  out << "mean\t" << format_score(mean_overlap) << '\n';
  out << "metric\trun_a\trun_b\tdelta\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out << specs[i].name() << '\t' << format_score(metric_a[i]) << '\t' << format_score(metric_b[i]) << '\t'
        << format_score(delta[i]) << '\n';
  }
  return out.str();
}

double recall_vs_oracle(const Run& approx, const Run& exact, std::size_t k) {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (exact.lists.empty()) fail(ErrorCode::kInvalidArgument, "oracle run is empty");
  double sum = 0.0;
  for (const auto& [qid, list] : exact.lists) {
    const auto truth = top_set(list, k);
    if (truth.empty()) {
      sum += 1.0;
      continue;
    }
    const auto it = approx.lists.find(qid);
    if (it == approx.lists.end()) continue;
    const auto got = top_set(it->second, k);
    std::size_t hit = 0;
    for (const auto& d : got) hit += truth.count(d);
    sum += static_cast<double>(hit) / static_cast<double>(truth.size());
  }
  return sum / static_cast<double>(exact.lists.size());
}

}  // namespace latebench
