#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "latebench/file_util.hpp"
#include "latebench/metrics.hpp"
#include "latebench/trec_io.hpp"

namespace latebench {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

// Captures warnings for the lifetime of the object.
struct WarningSink {
  std::vector<std::string> messages;
  WarningSink() {
    set_warning_handler([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningSink() { set_warning_handler(nullptr); }
};

latebench::Run run_of(std::initializer_list<std::pair<std::string, std::vector<std::string>>> lists) {
  latebench::Run run;
  for (const auto& [qid, docs] : lists) {
    RankedList l{qid, {}};
    double score = 100.0;
    for (const auto& d : docs) l.docs.push_back({d, score--});
    run.lists[qid] = l;
  }
  return run;
}

std::vector<std::string> ranked_with(const std::string& target, std::size_t rank) {
  std::vector<std::string> docs;
  for (std::size_t i = 1; i < rank; ++i) docs.push_back("filler" + std::to_string(i));
  docs.push_back(target);
  return docs;
}

TEST(Mrr, RankOneAndBeyondCutoff) {
  Qrels q;
  q.add("a", "t", 1);
  q.add("b", "t", 1);
  const latebench::Run run = run_of({{"a", ranked_with("t", 1)}, {"b", ranked_with("t", 11)}});
  const auto r = mrr_at_k(run, q, 10);
  EXPECT_DOUBLE_EQ(r.per_query.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(r.per_query.at("b"), 0.0);
}

TEST(Mrr, ThreeQueryHandComputation) {
  Qrels q;
  for (const char* id : {"a", "b", "c"}) q.add(id, "t", 1);
  const latebench::Run run = run_of({{"a", ranked_with("t", 1)}, {"b", ranked_with("t", 4)}, {"c", {"x", "y"}}});
  EXPECT_NEAR(mrr_at_k(run, q, 10).mean, (1.0 + 0.25 + 0.0) / 3.0, 1e-12);
}

TEST(Recall, SingleAndPartial) {
  Qrels q;
  q.add("a", "t", 1);
  q.add("b", "r1", 1);
  q.add("b", "r2", 2);
  const latebench::Run run = run_of({{"a", ranked_with("t", 5)}, {"b", {"r2", "x"}}});
  const auto r = recall_at_k(run, q, 5);
  EXPECT_DOUBLE_EQ(r.per_query.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(r.per_query.at("b"), 0.5);
}

TEST(Recall, KnownItemFractionOfQueriesHit) {
  Qrels q;
  latebench::Run run;
  for (int i = 0; i < 5; ++i) {
    const std::string id = "q" + std::to_string(i);
    q.add(id, "t" + std::to_string(i), 1);
    run.lists[id] = run_of({{id, ranked_with(i < 3 ? "t" + std::to_string(i) : "other", 3)}}).lists.at(id);
  }
  EXPECT_DOUBLE_EQ(recall_at_k(run, q, 10).mean, 3.0 / 5.0);
}

TEST(Recall, ZeroRelevantQuerySkippedWithWarning) {
  WarningSink sink;
  Qrels q;
  q.add("a", "t", 1);
  q.add("z", "t", 0);
  const auto r = recall_at_k(run_of({{"a", {"t"}}, {"z", {"t"}}}), q, 10);
  EXPECT_EQ(r.query_count, 1u);
  EXPECT_FALSE(r.per_query.count("z"));
  EXPECT_FALSE(sink.messages.empty());
}

TEST(Ndcg, PerfectOrderingIsOne) {
  Qrels q;
  q.add("a", "x", 3);
  q.add("a", "y", 2);
  q.add("a", "z", 1);
  EXPECT_NEAR(ndcg_at_k(run_of({{"a", {"x", "y", "z"}}}), q, 10).mean, 1.0, 1e-12);
}

TEST(Ndcg, SingleRelevantAtRankTwo) {
  Qrels q;
  q.add("a", "t", 1);
  EXPECT_NEAR(ndcg_at_k(run_of({{"a", {"x", "t"}}}), q, 10).mean, 1.0 / std::log2(3.0), 1e-12);
  EXPECT_NEAR(1.0 / std::log2(3.0), 0.63093, 1e-5);
}

TEST(Ndcg, UnjudgedOnlyIsZero) {
  Qrels q;
  q.add("a", "t", 2);
  EXPECT_DOUBLE_EQ(ndcg_at_k(run_of({{"a", {"x", "y"}}}), q, 10).mean, 0.0);
}

TEST(Metrics, QueryAbsentFromRunScoresZero) {
  Qrels q;
  q.add("a", "t", 1);
  q.add("b", "t", 1);
  const latebench::Run run = run_of({{"a", {"t"}}});
  EXPECT_DOUBLE_EQ(mrr_at_k(run, q, 10).mean, 0.5);
  EXPECT_DOUBLE_EQ(ndcg_at_k(run, q, 10).per_query.at("b"), 0.0);
}

TEST(Metrics, UnjudgedRunQueryWarnsOrFailsWhenStrict) {
  Qrels q;
  q.add("a", "t", 1);
  const latebench::Run run = run_of({{"a", {"t"}}, {"extra", {"t"}}});
  {
    WarningSink sink;
    EXPECT_DOUBLE_EQ(mrr_at_k(run, q, 10).mean, 1.0);
    EXPECT_EQ(sink.messages.size(), 1u);
  }
  EXPECT_EQ(code_of([&] { mrr_at_k(run, q, 10, {.strict = true}); }), ErrorCode::kQueryMissingFromQrels);
}

TEST(Metrics, EmptyRunGivesZerosWithWarning) {
  WarningSink sink;
  Qrels q;
  q.add("a", "t", 1);
  const auto rep = evaluate_run(latebench::Run{}, q, {{Metric::kMrr, 10}, {Metric::kRecall, 1000}, {Metric::kNdcg, 10}});
  for (const auto& m : rep.metrics) EXPECT_EQ(m.mean, 0.0);
  EXPECT_FALSE(sink.messages.empty());
}

TEST(Metrics, CutoffMonotonicityAndRankInvariance) {
  Qrels q;
  q.add("a", "r1", 1);
  q.add("a", "r2", 2);
  q.add("b", "r3", 1);
  const latebench::Run run = run_of({{"a", {"x", "r2", "y", "z", "r1"}}, {"b", {"u", "v", "w", "r3"}}});
  for (std::size_t k = 1; k < 6; ++k) {
    EXPECT_LE(mrr_at_k(run, q, k).mean, mrr_at_k(run, q, k + 1).mean);
    EXPECT_LE(recall_at_k(run, q, k).mean, recall_at_k(run, q, k + 1).mean);
  }
  latebench::Run scaled = run;
  for (auto& [qid, l] : scaled.lists) {
    for (auto& d : l.docs) d.score = std::exp(d.score / 50.0) - 3.0;
  }
  const auto specs = default_metric_specs();
  EXPECT_EQ(evaluate_run(run, q, specs).to_tsv(), evaluate_run(scaled, q, specs).to_tsv());
}

TEST(Metrics, DeletingAQueryChangesOnlyTheMean) {
  Qrels q;
  q.add("a", "t", 1);
  q.add("b", "t", 1);
  Qrels q2;
  q2.add("a", "t", 1);
  const latebench::Run run = run_of({{"a", ranked_with("t", 2)}, {"b", ranked_with("t", 1)}});
  EXPECT_EQ(mrr_at_k(run, q, 10).per_query.at("a"), mrr_at_k(run, q2, 10).per_query.at("a"));
}

TEST(MetricSpec, ParseAndName) {
  EXPECT_EQ(MetricSpec::parse("MRR@10"), (MetricSpec{Metric::kMrr, 10}));
  EXPECT_EQ(MetricSpec::parse("recall@1000"), (MetricSpec{Metric::kRecall, 1000}));
  EXPECT_EQ(MetricSpec::parse("NDCG@5").name(), "nDCG@5");
  EXPECT_EQ(code_of([] { MetricSpec::parse("MAP@10"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { MetricSpec::parse("MRR"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { MetricSpec::parse("MRR@0"); }), ErrorCode::kInvalidArgument);
}

TEST(Qrels, DuplicateJudgment) {
  Qrels q;
  q.add("a", "t", 1);
  EXPECT_EQ(code_of([&] { q.add("a", "t", 2); }), ErrorCode::kDuplicateJudgment);
}

// Frozen output of tests/oracles/trec_reference.py on the graded fixture.
TEST(GradedFixture, MatchesReferenceScript) {
  const std::string dir = LATEBENCH_TEST_DATA;
  const Qrels qrels = parse_qrels(read_file(dir + "/graded_qrels.txt"));
  WarningSink sink;  // q6 is unjudged
  const latebench::Run run = parse_run(read_file(dir + "/graded_run.txt"));
  const auto rep = evaluate_run(run, qrels, default_metric_specs());
  std::istringstream expected(read_file(dir + "/graded_expected.tsv"));
  std::string spec, qid;
  double value = 0.0;
  int checked = 0;
  while (expected >> spec >> qid >> value) {
    const MetricReport& m = rep.at(MetricSpec::parse(spec));
    const double got = qid == "all" ? m.mean : m.per_query.at(qid);
    EXPECT_NEAR(got, value, 1e-6) << spec << " " << qid;
    ++checked;
  }
  EXPECT_EQ(checked, 24);
}

}  // namespace
}  // namespace latebench
