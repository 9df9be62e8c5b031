// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "latebench/bundle.hpp"
#include "latebench/diagnostics.hpp"
#include "latebench/file_util.hpp"
#include "latebench/index_io.hpp"
#include "latebench/ivf_index.hpp"
#include "latebench/metrics.hpp"
#include "latebench/plaid_index.hpp"
#include "latebench/run.hpp"
#include "latebench/synthetic.hpp"
#include "latebench/trec_io.hpp"

namespace fs = std::filesystem;
using namespace latebench;

namespace {

// Tolerances and pinned values.
constexpr double kWallLimitSeconds = 60.0;
constexpr double kMetricTolerance = 1e-6;
constexpr double kPlateauTolerance = 1e-6;
constexpr double kMinStorageRatio = 6.0;
constexpr double kMinResidualRecall = 0.9;
// Recall@10 of residual-rescored vs residual-off top-10 on the planted
// corpus below, as first measured; later builds may not fall more than
// kResidualRecallSlack under it.
constexpr double kPinnedResidualRecall = 0.932;
constexpr double kResidualRecallSlack = 0.02;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& text) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += text;
  }
  Outcome done() const { return {pass_, pass_ ? notes_ : failures_ + (notes_.empty() ? "" : " | " + notes_)}; }

 private:
  bool pass_ = true;
  std::string failures_;
  std::string notes_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

SyntheticSpec main_spec() {
  SyntheticSpec s;
  s.doc_count = 2000;
  s.min_tokens = 8;
  s.max_tokens = 32;
  s.dim = 128;
  s.queries = 100;
  s.seed = 7;
  return s;
}

const SyntheticData& main_data() {
  static const SyntheticData data = generate_synthetic(main_spec());
  return data;
}

std::shared_ptr<const Corpus> main_corpus() {
  static const auto corpus = std::make_shared<const Corpus>(main_data().corpus);
  return corpus;
}

const latebench::Run& exact_run(std::size_t k) {
  static std::map<std::size_t, latebench::Run> cache;
  auto it = cache.find(k);
  if (it == cache.end()) {
    it = cache.emplace(k, search_all(ExactRetriever(main_corpus()), main_data().queries, k)).first;
  }
  return it->second;
}

template <class Search>
latebench::Run run_each(const Corpus& queries, Search&& search) {
  latebench::Run run;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    RankedList list = search(queries.doc(q));
    list.query_id = queries.id(q);
    run.lists.emplace(queries.id(q), std::move(list));
  }
  return run;
}

bool is_subset(const std::vector<std::size_t>& small, const std::vector<std::size_t>& large) {
  return std::includes(large.begin(), large.end(), small.begin(), small.end());
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (double v : values) out += (out.empty() ? "" : ",") + fmt(v);
  return out;
}

// 1. IVF with exhaustive settings equals exact search.
Outcome ivf_oracle() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = main_corpus();
  const auto& queries = main_data().queries;
  const auto idx = IvfIndex::build(corpus, {.nlist = 64});
  const IvfSearchParams all{.nprobe = 64, .per_token_candidates = corpus->manifest().total_vectors};
  const auto ivf = run_each(queries, [&](const TokenMatrix& q) { return idx.search(q, 100, all); });
  const auto& exact = exact_run(100);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require(ivf == exact, "ivf top-100 differs from exact");
  check.require(seconds < kWallLimitSeconds, "wall time " + fmt(seconds, 1) + " s");
  check.note(std::to_string(queries.size()) + " queries, " + std::to_string(corpus->manifest().total_vectors) +
             " vectors, " + fmt(seconds, 1) + " s including build and exact search");
  return check.done();
}

// 2. PLAID with exhaustive settings equals exact search.
Outcome plaid_oracle() {
  Check check;
  const auto corpus = main_corpus();
  const auto idx = PlaidIndex::build(corpus, {.num_centroids = 256, .ndocs = corpus->size()});
  const PlaidSearchParams all{.ncells = 256, .centroid_score_threshold = -1.0, .ndocs = corpus->size()};
  const auto plaid = run_each(main_data().queries, [&](const TokenMatrix& q) { return idx.search(q, 100, all); });
  check.require(plaid == exact_run(100), "plaid top-100 differs from exact");
  check.note("256 centroids, ncells=256, threshold=-1, ndocs=" + std::to_string(corpus->size()));
  return check.done();
}

// Recall@100 against the oracle moves monotonically with each knob, and
// candidate sets nest. `label` prefixes the notes.
void check_monotone(Check& check, const std::string& label, std::shared_ptr<const Corpus> corpus,
                    const Corpus& queries) {
  const auto exact = search_all(ExactRetriever(corpus), queries, 100);

  const std::size_t nlist = 128;
  const auto ivf = IvfIndex::build(corpus, {.nlist = nlist});
  std::vector<double> ivf_recall;
  std::vector<std::vector<std::size_t>> prev(queries.size());
  for (std::size_t np : {std::size_t{1}, std::size_t{4}, std::size_t{16}, std::size_t{64}, nlist}) {
    const IvfSearchParams p{.nprobe = np};
    for (std::size_t q = 0; q < queries.size(); ++q) {
      auto cur = ivf.candidates(queries.doc(q), p);
      check.require(is_subset(prev[q], cur), label + ": ivf candidates not nested at nprobe=" + std::to_string(np));
      prev[q] = std::move(cur);
    }
    ivf_recall.push_back(recall_vs_oracle(
        run_each(queries, [&](const TokenMatrix& m) { return ivf.search(m, 100, p); }), exact, 100));
  }
  check.require(std::is_sorted(ivf_recall.begin(), ivf_recall.end()),
                label + ": ivf recall decreases: " + join(ivf_recall));

  const auto plaid = PlaidIndex::build(corpus, {.num_centroids = 256, .ndocs = corpus->size()});
  const std::vector<std::size_t> ncells_set{4, 8, 16, 32, 64};
  const std::vector<double> thresholds{0.3, 0.4, 0.5};
  // recall[t][c] and cands[t][c][q]
  std::vector<std::vector<double>> recall(thresholds.size(), std::vector<double>(ncells_set.size()));
  std::vector<std::vector<std::vector<std::vector<std::size_t>>>> cands(
      thresholds.size(), std::vector<std::vector<std::vector<std::size_t>>>(ncells_set.size()));
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    for (std::size_t c = 0; c < ncells_set.size(); ++c) {
      const PlaidSearchParams p{.ncells = ncells_set[c], .centroid_score_threshold = thresholds[t],
                                .ndocs = corpus->size()};
      for (std::size_t q = 0; q < queries.size(); ++q) cands[t][c].push_back(plaid.candidates(queries.doc(q), p));
      recall[t][c] = recall_vs_oracle(
          run_each(queries, [&](const TokenMatrix& m) { return plaid.search(m, 100, p); }), exact, 100);
    }
  }
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    for (std::size_t c = 0; c < ncells_set.size(); ++c) {
      for (std::size_t q = 0; q < queries.size(); ++q) {
        if (c > 0 && !is_subset(cands[t][c - 1][q], cands[t][c][q])) {
          check.require(false, label + ": plaid candidates not nested in ncells at threshold " + fmt(thresholds[t], 1));
        }
        if (t > 0 && !is_subset(cands[t][c][q], cands[t - 1][c][q])) {
          check.require(false, label + ": plaid candidates not nested in threshold at ncells " +
                                   std::to_string(ncells_set[c]));
        }
      }
      if (c > 0) check.require(recall[t][c] >= recall[t][c - 1], label + ": plaid recall decreases with ncells");
      if (t > 0) check.require(recall[t][c] <= recall[t - 1][c], label + ": plaid recall increases with threshold");
    }
  }
  check.note(label + " ivf nprobe {1,4,16,64,128}: " + join(ivf_recall));
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    check.note(label + " plaid t=" + fmt(thresholds[t], 1) + " ncells {4..64}: " + join(recall[t]));
  }
}

// 3. Monotonicity on the planted corpus and on a dispersed one (many more
// concepts than centroids, noisy tokens) where the knobs bind.
Outcome monotonicity() {
  Check check;
  check_monotone(check, "planted", main_corpus(), main_data().queries);
  SyntheticSpec s = main_spec();
  s.num_concepts = 1024;
  s.doc_noise = 1.0;
  s.query_noise = 1.0;
  s.queries = 50;
  s.seed = 13;
  const auto dispersed = generate_synthetic(s);
  check_monotone(check, "dispersed", std::make_shared<const Corpus>(dispersed.corpus), dispersed.queries);
  return check.done();
}

// 4. Documents confined to <= 4 centroids: ncells beyond 4 changes nothing.
Outcome saturation() {
  Check check;
  SyntheticSpec s = main_spec();
  s.num_concepts = 64;
  s.concepts_per_doc = 3;
  s.background_rate = 0.0;
  s.doc_noise = 0.3;
  s.seed = 11;
  const auto data = generate_synthetic(s);
  auto corpus = std::make_shared<const Corpus>(data.corpus);
  const auto idx = PlaidIndex::build(corpus, {.num_centroids = 64, .ndocs = corpus->size()});
  std::vector<std::vector<std::uint32_t>> codes;
  for (std::size_t d = 0; d < idx.doc_count(); ++d) codes.push_back(idx.centroid_codes(d));
  const auto footprint = coverage_from_codes(idx.doc_ids(), codes);
  check.require(footprint.max_unique <= 4, "a document occupies " + std::to_string(footprint.max_unique) + " centroids");

  const auto grid =
      grid_search(idx, data.queries, data.qrels, {4, 8, 16, 32, 64}, {0.3, 0.4, 0.5}, corpus->size(), 1000);
  check.require(grid.rows.size() == 15, "grid has " + std::to_string(grid.rows.size()) + " rows");
  for (std::size_t i = 1; i < grid.rows.size(); ++i) {
    const GridRow& a = grid.rows[i - 1];
    const GridRow& b = grid.rows[i];
    if (a.threshold != b.threshold) continue;
    GridRow a_cmp = a;
    a_cmp.ncells = b.ncells;
    check.require(a_cmp == b, "row ncells=" + std::to_string(b.ncells) + " t=" + fmt(b.threshold, 1) +
                                  " differs from ncells=" + std::to_string(a.ncells));
  }
  check.note("max centroids per doc " + std::to_string(footprint.max_unique) + ", mean " +
             fmt(footprint.mean_unique, 2) + "; MRR@10 at t=0.4: " + fmt(grid.rows[5].mrr_at_10));
  return check.done();
}

// 5. Pooling to 32 vectors shrinks the centroid footprint; a document of
// identical rows covers exactly one centroid.
Outcome coverage_direction() {
  Check check;
  SyntheticSpec s = main_spec();
  s.doc_count = 1000;
  s.min_tokens = 64;
  s.max_tokens = 128;
  s.queries = 10;
  s.seed = 5;
  const auto data = generate_synthetic(s);
  auto corpus = std::make_shared<const Corpus>(data.corpus);
  const auto idx = PlaidIndex::build(corpus, {.num_centroids = 256, .ndocs = corpus->size()});
  const Corpus pooled = pool_corpus(*corpus, 32);
  const auto raw = centroid_coverage(idx, corpus->size(), 42);
  const auto pool = centroid_coverage(idx, pooled, corpus->size(), 42);
  check.require(pool.mean_unique < raw.mean_unique,
                "pooled mean unique " + fmt(pool.mean_unique, 2) + " >= unpooled " + fmt(raw.mean_unique, 2));

  TokenMatrix same(32, corpus->dim());
  for (std::size_t r = 0; r < 32; ++r) {
    const auto src = corpus->doc(0).row(0);
    std::copy(src.begin(), src.end(), same.row(r).begin());
  }
  const Corpus fixture({"identical"}, {same});
  const auto one = centroid_coverage(idx, fixture, 1, 42);
  check.require(one.unique_counts.at(0) == 1, "identical-row doc covers " + std::to_string(one.unique_counts[0]));
  check.require(one.coverage_fraction == 0.03125, "identical-row fraction " + fmt(one.coverage_fraction, 6));
  check.note("mean unique centroids: unpooled " + fmt(raw.mean_unique, 2) + " over " + fmt(raw.mean_rows, 1) +
             " rows, pooled C=32 " + fmt(pool.mean_unique, 2) + "; identical-row doc unique=1, fraction " +
             fmt(100.0 * one.coverage_fraction, 3) + "%");
  return check.done();
}

std::string capture(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = pclose(pipe);
  return out;
}

// 6. Metrics agree with the standalone reference script.
Outcome metric_parity() {
  Check check;
  const std::string dir = LATEBENCH_TEST_DATA;
  const Qrels qrels = parse_qrels(read_file(dir + "/graded_qrels.txt"));
  set_warning_handler([](std::string_view) {});
  const auto report = evaluate_run(parse_run(read_file(dir + "/graded_run.txt")), qrels, default_metric_specs());
  set_warning_handler(nullptr);

  auto compare = [&](const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string spec, qid;
    double value = 0.0;
    std::size_t count = 0;
    double worst = 0.0;
    while (in >> spec >> qid >> value) {
      const MetricReport& m = report.at(MetricSpec::parse(spec));
      const auto it = m.per_query.find(qid);
      const double got = qid == "all" ? m.mean : (it == m.per_query.end() ? NAN : it->second);
      const double diff = std::fabs(got - value);
      worst = std::max(worst, std::isnan(diff) ? INFINITY : diff);
      ++count;
    }
    check.require(count == 24, source + " gave " + std::to_string(count) + " values");
    check.require(worst <= kMetricTolerance, source + " max abs diff " + std::to_string(worst));
    check.note(source + ": " + std::to_string(count) + " values, max abs diff " + std::to_string(worst));
  };
  compare(read_file(dir + "/graded_expected.tsv"), "frozen reference");
  int status = 0;
  const std::string script = std::string(LATEBENCH_TEST_DATA) + "/../oracles/trec_reference.py";
  const std::string live =
      capture("python3 '" + script + "' '" + dir + "/graded_qrels.txt' '" + dir + "/graded_run.txt' 2>/dev/null", status);
  if (status == 0) {
    compare(live, "live reference script");
  } else {
    check.note("python3 unavailable, live script skipped");
  }
  return check.done();
}

// 7. Filler never helps the exact oracle; truncation plateaus once the
// signal prefix is in.
Outcome filler_dilution() {
  Check check;
  std::vector<double> clean, diluted, clean_gap, diluted_gap;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    SyntheticSpec s = main_spec();
    s.doc_count = 500;
    s.queries = 50;
    s.seed = seed;
    for (double f : {0.0, 0.7}) {
      s.filler_fraction = f;
      const auto data = generate_synthetic(s);
      const auto run = search_all(ExactRetriever(std::make_shared<const Corpus>(data.corpus)), data.queries, 10);
      double gap = 0.0;
      for (double g : data.relative_margins) gap += g / static_cast<double>(data.relative_margins.size());
      (f == 0.0 ? clean : diluted).push_back(mrr_at_k(run, data.qrels, 10).mean);
      (f == 0.0 ? clean_gap : diluted_gap).push_back(gap);
    }
    check.require(diluted.back() <= clean.back(), "seed " + std::to_string(seed) + ": MRR@10 rose with filler");
  }
  check.note("MRR@10 f=0.0 " + join(clean) + " vs f=0.7 " + join(diluted));
  check.note("mean relative target gap f=0.0 " + join(clean_gap) + " vs f=0.7 " + join(diluted_gap));

  SyntheticSpec s = main_spec();
  s.signal_tokens = 20;
  s.filler_fraction = 0.7;
  const auto data = generate_synthetic(s);
  const ExactRetriever exact(std::make_shared<const Corpus>(data.corpus));
  const auto table = truncation_ablation(exact, data.queries, data.qrels, {10, 20, 40, 60, 80, 100, 121}, 1000);
  check.require(table.rows.size() == 7, "ablation has " + std::to_string(table.rows.size()) + " rows");
  const AblationRow* ref = nullptr;
  for (const auto& row : table.rows) {
    if (row.length < s.signal_tokens) continue;
    if (!ref) {
      ref = &row;
      continue;
    }
    const bool same = std::fabs(row.mrr_at_10 - ref->mrr_at_10) <= kPlateauTolerance &&
                      std::fabs(row.recall_at_1000 - ref->recall_at_1000) <= kPlateauTolerance &&
                      std::fabs(row.ndcg_at_10 - ref->ndcg_at_10) <= kPlateauTolerance;
    check.require(same, "length " + std::to_string(row.length) + " differs from length " + std::to_string(ref->length));
  }
  std::vector<double> mrr;
  for (const auto& row : table.rows) mrr.push_back(row.mrr_at_10);
  check.note("ablation MRR@10 at {10,20,40,60,80,100,121} with " + std::to_string(s.signal_tokens) + " signal of " +
             std::to_string(data.queries.doc(0).rows()) + " rows: " + join(mrr));
  return check.done();
}

struct Cli {
  fs::path dir;
  std::string log;

  Cli() {
    dir = fs::temp_directory_path() / ("latebench_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    log = (dir / "cli.log").string();
  }
  ~Cli() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  // Runs "latebench <args>"; returns the exit status.
  int run(const std::string& args) const {
    const std::string cmd = std::string("'") + LATEBENCH_CLI + "' " + args + " >>'" + log + "' 2>&1";
    return std::system(cmd.c_str());
  }
};

Cli& cli() {
  static Cli instance;
  return instance;
}

// Produces the CLI fixtures shared by criteria 8 and 10. Returns false on
// the first failing command.
bool cli_pipeline(std::string& error) {
  static int state = 0;  // 0 not run, 1 ok, 2 failed
  static std::string saved_error;
  if (state == 0) {
    const Cli& c = cli();
    const std::vector<std::string> steps = {
        "generate --docs " + c.path("docs.lbb") + " --queries " + c.path("queries.lbb") + " --qrels " +
            c.path("qrels.txt") + " --doc-count 1000 --query-count 50 --dim 64 --seed 3",
        "pool --corpus " + c.path("docs.lbb") + " --slots 8 --out " + c.path("pooled.lbb"),
        "build --corpus " + c.path("docs.lbb") + " --backend plaid --num-centroids 128 --ndocs 1000 --out " +
            c.path("plaid.lbi"),
        "build --corpus " + c.path("docs.lbb") + " --backend plaid --num-centroids 128 --ndocs 1000 --residual-bits 2 "
            "--out " + c.path("plaid_r2.lbi"),
        "build --corpus " + c.path("docs.lbb") + " --backend ivf --nlist 64 --out " + c.path("ivf.lbi"),
        "search --index " + c.path("plaid.lbi") + " --queries " + c.path("queries.lbb") + " --k 100 --out " +
            c.path("plaid.run"),
        "search --index " + c.path("ivf.lbi") + " --queries " + c.path("queries.lbb") + " --k 100 --out " +
            c.path("ivf.run"),
        "search --corpus " + c.path("docs.lbb") + " --queries " + c.path("queries.lbb") + " --k 100 --out " +
            c.path("exact.run"),
        "evaluate --run " + c.path("exact.run") + " --qrels " + c.path("qrels.txt") + " --out " + c.path("eval.tsv"),
        "diagnose coverage --index " + c.path("plaid.lbi") + " --sample 200 --out " + c.path("coverage.tsv"),
        "diagnose grid --index " + c.path("plaid.lbi") + " --queries " + c.path("queries.lbb") + " --qrels " +
            c.path("qrels.txt") + " --ncells 4,8,16,32,64 --threshold 0.3,0.4,0.5 --ndocs 1000 --k 100 --out " +
            c.path("grid.tsv"),
        "diagnose ablation --index " + c.path("plaid_r2.lbi") + " --queries " + c.path("queries.lbb") + " --qrels " +
            c.path("qrels.txt") + " --lengths 2,4,8 --k 100 --out " + c.path("ablation.tsv"),
        "diagnose agreement --run-a " + c.path("plaid.run") + " --run-b " + c.path("exact.run") + " --qrels " +
            c.path("qrels.txt") + " --k 10 --out " + c.path("agreement.tsv"),
    };
    state = 1;
    for (const auto& step : steps) {
      if (c.run(step) != 0) {
        state = 2;
        saved_error = "command failed: latebench " + step + " (log " + c.log + ")";
        break;
      }
    }
  }
  error = saved_error;
  return state == 1;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

// 8. The CLI grid emits exactly 15 configurations.
Outcome grid_completeness() {
  Check check;
  std::string error;
  if (!cli_pipeline(error)) return {false, error};
  const auto lines = data_lines(read_file(cli().path("grid.tsv")));
  check.require(!lines.empty() && lines[0].rfind("ndocs\t", 0) == 0, "missing grid header");
  const std::size_t rows = lines.empty() ? 0 : lines.size() - 1;
  check.require(rows == 15, "grid has " + std::to_string(rows) + " rows");
  check.note(std::to_string(rows) + " rows over ncells {4,8,16,32,64} x threshold {0.3,0.4,0.5} at ndocs 1000");
  return check.done();
}

// 9. Residual storage ratio and residual-vs-full rescoring agreement.
Outcome residual_codec() {
  Check check;
  SyntheticSpec s = main_spec();
  s.doc_count = 500;
  s.min_tokens = 20;
  s.max_tokens = 20;
  s.queries = 10;
  const auto small = generate_synthetic(s);
  auto small_corpus = std::make_shared<const Corpus>(small.corpus);
  const auto packed = PlaidIndex::build(small_corpus, {.num_centroids = 256, .ndocs = 500, .residual_bits = 2});
  const StorageReport storage = packed.storage();
  check.require(storage.vectors == 10000, "corpus has " + std::to_string(storage.vectors) + " vectors");
  check.require(storage.ratio >= kMinStorageRatio, "ratio " + fmt(storage.ratio, 3));
  check.require(storage_report(10000, 128, 256, 2).ratio == storage.ratio, "arithmetic report disagrees");

  const auto corpus = main_corpus();
  PlaidConfig cfg{.num_centroids = 256, .ndocs = 4096};
  const auto full = PlaidIndex::build(corpus, cfg);
  cfg.residual_bits = 2;
  const auto resid = PlaidIndex::build(corpus, cfg);
  const auto& queries = main_data().queries;
  const auto a = run_each(queries, [&](const TokenMatrix& q) { return resid.search(q, 10); });
  const auto b = run_each(queries, [&](const TokenMatrix& q) { return full.search(q, 10); });
  const double recall = recall_vs_oracle(a, b, 10);
  check.require(recall >= kMinResidualRecall, "Recall@10 " + fmt(recall));
  check.require(recall >= kPinnedResidualRecall - kResidualRecallSlack,
                "Recall@10 " + fmt(recall) + " regressed from pinned " + fmt(kPinnedResidualRecall, 3));
  const double mrr_r = mrr_at_k(a, main_data().qrels, 10).mean;
  const double mrr_f = mrr_at_k(b, main_data().qrels, 10).mean;
  check.note("10000 vectors: " + std::to_string(storage.compressed_bytes) + " B vs float16 " +
             std::to_string(storage.raw_float16_bytes) + " B, ratio " + fmt(storage.ratio, 2) + "x");
  check.note("Recall@10 residual vs residual-off " + fmt(recall) + " (pinned " + fmt(kPinnedResidualRecall, 3) +
             "); MRR@10 " + fmt(mrr_r) + " vs " + fmt(mrr_f));
  return check.done();
}

std::string command_of(const std::string& bytes) {
  const std::string key = "# command: ";
  std::size_t pos = bytes.rfind(key, 0) == 0 ? 0 : bytes.find("\n" + key);
  if (pos == std::string::npos) return {};
  if (pos != 0) ++pos;
  const std::size_t end = bytes.find('\n', pos);
  return bytes.substr(pos + key.size(), end - pos - key.size());
}

// 10. Determinism, lossless round trips, reproducible CLI outputs.
Outcome determinism() {
  Check check;
  {
    const auto corpus = main_corpus();
    const PlaidConfig p{.num_centroids = 64, .ndocs = 500, .residual_bits = 2};
    AnyIndex a{.backend = Backend::kPlaid, .corpus = corpus};
    AnyIndex b = a;
    a.plaid = std::make_shared<const PlaidIndex>(PlaidIndex::build(corpus, p));
    b.plaid = std::make_shared<const PlaidIndex>(PlaidIndex::build(corpus, p));
    check.require(write_index(a) == write_index(b), "plaid rebuild not byte-identical");
    AnyIndex c{.backend = Backend::kIvf, .corpus = corpus};
    AnyIndex d = c;
    c.ivf = std::make_shared<const IvfIndex>(IvfIndex::build(corpus, {.nlist = 64}));
    d.ivf = std::make_shared<const IvfIndex>(IvfIndex::build(corpus, {.nlist = 64}));
    check.require(write_index(c) == write_index(d), "ivf rebuild not byte-identical");
    check.require(generate_synthetic(main_spec()).corpus == *corpus, "regenerated corpus differs");
  }

  std::string error;
  if (!cli_pipeline(error)) return {false, error};
  const Cli& c = cli();

  // Lossless round trips of CLI-written files.
  for (const char* name : {"docs.lbb", "queries.lbb", "pooled.lbb"}) {
    const std::string bytes = read_file(c.path(name));
    const Corpus corpus = read_bundle(bytes);
    check.require(write_bundle(corpus, bundle_comments(bytes)) == bytes, std::string(name) + " does not round-trip");
    check.require(read_bundle(write_bundle(corpus)) == corpus, std::string(name) + " reread differs");
  }
  for (const char* name : {"plaid.run", "ivf.run", "exact.run"}) {
    const std::string text = read_file(c.path(name));
    const auto run = parse_run(text);
    std::string body;
    for (const auto& line : data_lines(text)) body += line + "\n";
    const std::string first = body.substr(0, body.find('\n'));
    const std::string tag = first.substr(first.rfind(' ') + 1);
    check.require(write_run(run, tag) == body, std::string(name) + " does not round-trip");
  }
  for (const char* name : {"plaid.lbi", "plaid_r2.lbi", "ivf.lbi"}) {
    const std::string bytes = read_file(c.path(name));
    const AnyIndex idx = read_index(bytes);
    std::vector<std::string> comments;
    const std::string header = bytes.substr(0, bytes.find("\nend\n"));
    std::istringstream in(header);
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("# ", 0) == 0) comments.push_back(line.substr(2));
    }
    check.require(write_index(idx, comments) == bytes, std::string(name) + " does not round-trip");
  }

  // Each output's header command regenerates it byte for byte.
  const std::vector<std::vector<std::string>> outputs = {
      {"docs.lbb", "queries.lbb", "qrels.txt"},
      {"pooled.lbb"},
      {"plaid.lbi"},
      {"plaid_r2.lbi"},
      {"ivf.lbi"},
      {"plaid.run"},
      {"ivf.run"},
      {"exact.run"},
      {"eval.tsv"},
      {"coverage.tsv"},
      {"grid.tsv"},
      {"ablation.tsv"},
      {"agreement.tsv"},
  };
  std::size_t reproduced = 0, files = 0;
  for (const auto& group : outputs) {
    std::vector<std::string> before;
    std::string command;
    for (const auto& name : group) {
      before.push_back(read_file(c.path(name)));
      const std::string cmd = command_of(before.back());
      check.require(!cmd.empty(), name + " has no command header");
      check.require(command.empty() || cmd == command, name + " header differs within one command");
      command = cmd;
    }
    if (command.rfind("latebench ", 0) != 0) {
      check.require(false, group[0] + " header does not start with 'latebench '");
      continue;
    }
    for (const auto& name : group) fs::remove(c.path(name));
    const std::string sh =
        "'" + std::string(LATEBENCH_CLI) + "' " + command.substr(10) + " >>'" + c.log + "' 2>&1";
    if (std::system(sh.c_str()) != 0) {
      check.require(false, "header command of " + group[0] + " failed");
      continue;
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
      ++files;
      const bool same = fs::exists(c.path(group[i])) && read_file(c.path(group[i])) == before[i];
      check.require(same, group[i] + " not reproduced by its header");
      reproduced += same;
    }
  }
  check.note("in-process plaid/ivf rebuilds identical; bundles, runs and indexes round-trip; " +
             std::to_string(reproduced) + "/" + std::to_string(files) + " CLI outputs reproduced from their headers");
  return check.done();
}

}  // namespace

int main() {
  // Criterion 1 is timed single-threaded; the rest inherit the setting.
  setenv("LATEBENCH_THREADS", "1", 1);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"IVF exhaustive search equals exact top-100", ivf_oracle},
      {"PLAID exhaustive search equals exact top-100", plaid_oracle},
      {"Recall@100 and candidate sets monotone in nprobe, ncells, threshold", monotonicity},
      {"ncells saturation on a <=4-centroid corpus", saturation},
      {"pooled coverage below unpooled; identical rows give 1 centroid, 3.125%", coverage_direction},
      {"metric parity with the reference script", metric_parity},
      {"filler never raises MRR@10; truncation plateau", filler_dilution},
      {"CLI grid emits 15 rows", grid_completeness},
      {"residual storage ratio and rescoring recall", residual_codec},
      {"determinism, round trips, header reproducibility", determinism},
  };
  // LATEBENCH_ACCEPTANCE_ONLY=<n> runs a single criterion.
  std::size_t only = 0;
  if (const char* env = std::getenv("LATEBENCH_ACCEPTANCE_ONLY")) only = std::strtoul(env, nullptr, 10);
  int failed = 0;
  std::size_t ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != i + 1) continue;
    ++ran;
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !out.pass;
    std::cout << "criterion " << (i + 1) << ": " << (out.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
              << " [" << fmt(seconds, 1) << " s] " << out.detail << std::endl;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
