#include "latebench/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "latebench/trec_io.hpp"

namespace latebench {

void Qrels::add(const std::string& query_id, const std::string& doc_id, int grade) {
  if (query_id.empty() || doc_id.empty()) fail(ErrorCode::kInvalidArgument, "empty id in judgment");
  if (grade < 0) fail(ErrorCode::kInvalidArgument, "negative grade for (" + query_id + ", " + doc_id + ")");
  if (!judgments_[query_id].emplace(doc_id, grade).second) {
    fail(ErrorCode::kDuplicateJudgment, "duplicate judgment for (" + query_id + ", " + doc_id + ")");
  }
}

const std::map<std::string, int>* Qrels::find(const std::string& query_id) const {
  const auto it = judgments_.find(query_id);
  return it == judgments_.end() ? nullptr : &it->second;
}

std::size_t Qrels::size() const noexcept {
  std::size_t n = 0;
  for (const auto& [q, docs] : judgments_) n += docs.size();
  return n;
}

MetricSpec MetricSpec::parse(std::string_view text) {
  const auto at = text.find('@');
  if (at == std::string_view::npos) fail(ErrorCode::kInvalidArgument, "metric '" + std::string(text) + "' lacks @k");
  std::string name(text.substr(0, at));
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  MetricSpec spec;
  if (name == "mrr") {
    spec.metric = Metric::kMrr;
  } else if (name == "recall") {
    spec.metric = Metric::kRecall;
  } else if (name == "ndcg") {
    spec.metric = Metric::kNdcg;
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(text.substr(0, at)) + "'");
  }
  const std::string_view digits = text.substr(at + 1);
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), spec.k);
  if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || spec.k == 0) {
    fail(ErrorCode::kInvalidArgument, "bad cutoff in metric '" + std::string(text) + "'");
  }
  return spec;
}

std::string MetricSpec::name() const {
  const char* base = metric == Metric::kMrr ? "MRR" : metric == Metric::kRecall ? "Recall" : "nDCG";
  return std::string(base) + "@" + std::to_string(k);
}

std::vector<MetricSpec> default_metric_specs() {
  return {{Metric::kMrr, 10}, {Metric::kRecall, 50}, {Metric::kRecall, 1000}, {Metric::kNdcg, 10}};
}

namespace {

void check_run_queries(const Run& run, const Qrels& qrels, const EvalOptions& options) {
  for (const auto& [qid, list] : run.lists) {
    if (qrels.find(qid)) continue;
    if (options.strict) fail(ErrorCode::kQueryMissingFromQrels, "query '" + qid + "' has no judgments");
    warn("query '" + qid + "' has no judgments; skipped");
  }
}

const std::vector<ScoredDoc>& ranked_for(const Run& run, const std::string& qid) {
  static const std::vector<ScoredDoc> empty;
  const auto it = run.lists.find(qid);
  return it == run.lists.end() ? empty : it->second.docs;
}

int grade_of(const std::map<std::string, int>& judged, const std::string& doc) {
  const auto it = judged.find(doc);
  return it == judged.end() ? 0 : it->second;
}

double query_mrr(const std::vector<ScoredDoc>& ranked, const std::map<std::string, int>& judged, std::size_t k) {
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (grade_of(judged, ranked[i].doc_id) > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double query_ndcg(const std::vector<ScoredDoc>& ranked, const std::map<std::string, int>& judged, std::size_t k) {
  double dcg = 0.0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    dcg += grade_of(judged, ranked[i].doc_id) / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<int> grades;
  for (const auto& [doc, g] : judged) {
    if (g > 0) grades.push_back(g);
  }
  std::sort(grades.begin(), grades.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) {
    idcg += grades[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

void finalize(MetricReport& report) {
  report.query_count = report.per_query.size();
  double sum = 0.0;
  for (const auto& [q, v] : report.per_query) sum += v;
  report.mean = report.query_count ? sum / static_cast<double>(report.query_count) : 0.0;
}

void warn_if_empty(const Run& run) {
  if (run.lists.empty()) warn("run is empty; every judged query scores 0");
}

}  // namespace

MetricReport mrr_at_k(const Run& run, const Qrels& qrels, std::size_t k, EvalOptions options) {
  check_run_queries(run, qrels, options);
  warn_if_empty(run);
  MetricReport report{{Metric::kMrr, k}, {}, 0.0, 0};
  for (const auto& [qid, judged] : qrels.judgments()) report.per_query[qid] = query_mrr(ranked_for(run, qid), judged, k);
  finalize(report);
  return report;
}

MetricReport recall_at_k(const Run& run, const Qrels& qrels, std::size_t k, EvalOptions options) {
  check_run_queries(run, qrels, options);
  warn_if_empty(run);
  MetricReport report{{Metric::kRecall, k}, {}, 0.0, 0};
  for (const auto& [qid, judged] : qrels.judgments()) {
    std::set<std::string> relevant;
    for (const auto& [doc, g] : judged) {
      if (g > 0) relevant.insert(doc);
    }
    if (relevant.empty()) {
      warn("query '" + qid + "' has no relevant documents; skipped for " + report.spec.name());
      continue;
    }
    const auto& ranked = ranked_for(run, qid);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) hits += relevant.count(ranked[i].doc_id);
    report.per_query[qid] = static_cast<double>(hits) / static_cast<double>(relevant.size());
  }
  finalize(report);
  return report;
}

MetricReport ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k, EvalOptions options) {
  check_run_queries(run, qrels, options);
  warn_if_empty(run);
  MetricReport report{{Metric::kNdcg, k}, {}, 0.0, 0};
  for (const auto& [qid, judged] : qrels.judgments()) report.per_query[qid] = query_ndcg(ranked_for(run, qid), judged, k);
  finalize(report);
  return report;
}

MetricReport compute_metric(const Run& run, const Qrels& qrels, const MetricSpec& spec, EvalOptions options) {
  switch (spec.metric) {
    case Metric::kMrr: return mrr_at_k(run, qrels, spec.k, options);
    case Metric::kRecall: return recall_at_k(run, qrels, spec.k, options);
    case Metric::kNdcg: return ndcg_at_k(run, qrels, spec.k, options);
  }
  fail(ErrorCode::kInvalidArgument, "unknown metric");
}

const MetricReport& EvaluationReport::at(const MetricSpec& spec) const {
  for (const auto& m : metrics) {
    if (m.spec == spec) return m;
  }
  fail(ErrorCode::kInvalidArgument, "metric " + spec.name() + " not in report");
}

std::string EvaluationReport::to_tsv() const {
  std::ostringstream out;
  out << "query";
  for (const auto& m : metrics) out << '\t' << m.spec.name();
  out << '\n';
  auto cell = [](const MetricReport& m, const std::string& qid) -> std::string {
    const auto it = m.per_query.find(qid);
    return it == m.per_query.end() ? "-" : format_score(it->second);
  };
  for (const auto& qid : query_ids) {
    out << qid;
    for (const auto& m : metrics) out << '\t' << cell(m, qid);
    out << '\n';
  }
  out << "all";
  for (const auto& m : metrics) out << '\t' << format_score(m.mean);
  out << '\n';
  out << "queries";
  for (const auto& m : metrics) out << '\t' << m.query_count;
  out << '\n';
  return out.str();
}

EvaluationReport evaluate_run(const Run& run, const Qrels& qrels, const std::vector<MetricSpec>& specs,
                              EvalOptions options) {
  if (specs.empty()) fail(ErrorCode::kInvalidArgument, "no metrics requested");
  check_run_queries(run, qrels, options);
  // Warnings about unjudged run queries were emitted once above.
  Run judged_only;
  for (const auto& [qid, list] : run.lists) {
    if (qrels.find(qid)) judged_only.lists.emplace(qid, list);
  }
  EvaluationReport report;
  std::set<std::string> ids;
  for (const auto& spec : specs) {
    report.metrics.push_back(compute_metric(judged_only, qrels, spec, options));
    for (const auto& [q, v] : report.metrics.back().per_query) ids.insert(q);
  }
  report.query_ids.assign(ids.begin(), ids.end());
  return report;
}

}  // namespace latebench
