// latebench command-line driver. Talks to the engine only through the C API.
//
// Every output file starts with a "# command: ..." line holding the fully
// resolved command, so rerunning that line reproduces the file.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latebench/latebench.h"

namespace {

struct Failure : std::runtime_error {
  Failure(lb_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  lb_status status;
};

void check(lb_status s, const std::string& context) {
  if (s != LB_OK) throw Failure(s, context + ": " + lb_last_error());
}

[[noreturn]] void usage(const std::string& msg) { throw Failure(LB_INVALID_ARGUMENT, msg); }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Corpus = std::unique_ptr<lb_corpus, Deleter<lb_corpus, lb_corpus_free>>;
using Qrels = std::unique_ptr<lb_qrels, Deleter<lb_qrels, lb_qrels_free>>;
using Index = std::unique_ptr<lb_index, Deleter<lb_index, lb_index_free>>;
using Run = std::unique_ptr<lb_run, Deleter<lb_run, lb_run_free>>;
using Table = std::unique_ptr<lb_table, Deleter<lb_table, lb_table_free>>;

Corpus read_corpus(const std::string& path) {
  lb_corpus* c = nullptr;
  check(lb_corpus_read(path.c_str(), &c), path);
  return Corpus(c);
}
Qrels read_qrels(const std::string& path) {
  lb_qrels* q = nullptr;
  check(lb_qrels_read(path.c_str(), &q), path);
  return Qrels(q);
}
Index read_index(const std::string& path) {
  lb_index* i = nullptr;
  check(lb_index_read(path.c_str(), &i), path);
  return Index(i);
}
Run read_run(const std::string& path) {
  lb_run* r = nullptr;
  check(lb_run_read(path.c_str(), &r), path);
  return Run(r);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
  const bool plain = !s.empty() && s.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                                       "0123456789_-./=,@+:") == std::string::npos;
  if (plain) return s;
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

// Canonical command line, built from resolved values.
class Command {
 public:
  explicit Command(std::string words) : text_("latebench " + std::move(words)) {}
  Command& arg(const std::string& flag, const std::string& value) {
    text_ += " " + flag + " " + quote(value);
    return *this;
  }
  Command& arg(const std::string& flag, std::size_t value) { return arg(flag, std::to_string(value)); }
  Command& arg(const std::string& flag, double value) { return arg(flag, fmt(value)); }
  Command& flag(const std::string& f) {
    text_ += " " + f;
    return *this;
  }
  const std::string& text() const { return text_; }
  std::string header() const { return "command: " + text_; }
  void echo() const { std::cerr << "latebench: resolved " << text_ << "\n"; }

 private:
  std::string text_;
};

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += fmt(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

const char* backend_word(lb_backend b) {
  switch (b) {
    case LB_IVF: return "ivf";
    case LB_PLAID: return "plaid";
    case LB_EXACT: break;
  }
  return "exact";
}

lb_backend parse_backend(const std::string& s) {
  if (s == "exact") return LB_EXACT;
  if (s == "ivf") return LB_IVF;
  if (s == "plaid") return LB_PLAID;
  usage("unknown backend '" + s + "' (exact|ivf|plaid)");
}

// Search-time overrides shared by search and ablation.
struct Overrides {
  std::optional<std::size_t> nprobe;
  std::optional<std::size_t> per_token_candidates;
  std::optional<std::size_t> ncells;
  std::optional<double> threshold;
  std::optional<std::size_t> ndocs;

  void add_to(CLI::App* app) {
    app->add_option("--nprobe", nprobe, "IVF lists probed per query row");
    app->add_option("--per-token-candidates", per_token_candidates, "IVF per-list candidate cap");
    app->add_option("--ncells", ncells, "PLAID centroids probed per query row");
    app->add_option("--threshold", threshold, "PLAID absolute centroid score cutoff");
    app->add_option("--ndocs", ndocs, "PLAID approximate-stage survivors");
  }

  // Fills unset values from the index config and appends them to cmd.
  lb_search_params resolve(const lb_index* index, Command& cmd) const {
    lb_index_config cfg;
    check(lb_index_get_config(index, &cfg), "index");
    lb_search_params p{};
    if (cfg.backend == LB_IVF) {
      p.nprobe = nprobe.value_or(cfg.nprobe);
      p.per_token_candidates = per_token_candidates.value_or(cfg.per_token_candidates);
      cmd.arg("--nprobe", p.nprobe).arg("--per-token-candidates", p.per_token_candidates);
    } else if (cfg.backend == LB_PLAID) {
      p.ncells = ncells.value_or(cfg.ncells);
      p.has_threshold = 1;
      p.threshold = threshold.value_or(cfg.threshold);
      p.ndocs = ndocs.value_or(cfg.ndocs);
      cmd.arg("--ncells", p.ncells).arg("--threshold", p.threshold).arg("--ndocs", p.ndocs);
    }
    const bool ivf_flags = nprobe || per_token_candidates;
    const bool plaid_flags = ncells || threshold || ndocs;
    if ((ivf_flags && cfg.backend != LB_IVF) || (plaid_flags && cfg.backend != LB_PLAID)) {
      usage(std::string("search flags do not apply to a ") + backend_word(cfg.backend) + " index");
    }
    return p;
  }
};

// Either --index FILE or --corpus BUNDLE (exact search over the bundle).
struct IndexSource {
  std::string index_path;
  std::string corpus_path;

  void add_to(CLI::App* app) {
    auto* i = app->add_option("--index", index_path, "Index file");
    auto* c = app->add_option("--corpus", corpus_path, "Bundle searched exactly (instead of --index)");
    i->excludes(c);
  }
  void validate() const {
    if (index_path.empty() == corpus_path.empty()) usage("exactly one of --index or --corpus is required");
  }
  Index load(Command& cmd) const {
    if (!index_path.empty()) {
      cmd.arg("--index", index_path);
      return read_index(index_path);
    }
    cmd.arg("--corpus", corpus_path);
    Corpus corpus = read_corpus(corpus_path);
    lb_index_config cfg;
    lb_index_config_default(&cfg, LB_EXACT);
    lb_index* idx = nullptr;
    check(lb_index_build(corpus.get(), &cfg, &idx), corpus_path);
    return Index(idx);
  }
};

void write_table(const lb_table* table, const std::string& out, const Command& cmd) {
  check(lb_table_write(table, out.c_str(), cmd.header().c_str()), out);
  std::cerr << "latebench: wrote " << lb_table_rows(table) << " rows to " << out << "\n";
}

void require_k(std::size_t k) {
  if (k == 0) usage("--k must be >= 1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-vector late-interaction retrieval engine and diagnostic bench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lb_version()));

  // generate
  lb_synthetic_spec spec;
  lb_synthetic_spec_default(&spec);
  std::string gen_docs, gen_queries, gen_qrels, gen_dtype = "float32";
  auto* generate = app.add_subcommand("generate", "Write a planted-relevance corpus, queries and qrels");
  generate->add_option("--docs", gen_docs, "Output document bundle")->required();
  generate->add_option("--queries", gen_queries, "Output query bundle")->required();
  generate->add_option("--qrels", gen_qrels, "Output qrels")->required();
  generate->add_option("--doc-count", spec.doc_count);
  generate->add_option("--min-tokens", spec.min_tokens);
  generate->add_option("--max-tokens", spec.max_tokens);
  generate->add_option("--dim", spec.dim);
  generate->add_option("--num-concepts", spec.num_concepts);
  generate->add_option("--concepts-per-doc", spec.concepts_per_doc);
  generate->add_option("--query-count", spec.queries);
  generate->add_option("--signal-tokens", spec.signal_tokens);
  generate->add_option("--filler-fraction", spec.filler_fraction);
  generate->add_option("--margin", spec.margin);
  generate->add_option("--doc-noise", spec.doc_noise);
  generate->add_option("--query-noise", spec.query_noise);
  generate->add_option("--background-rate", spec.background_rate);
  generate->add_option("--background-noise", spec.background_noise);
  generate->add_option("--max-attempts", spec.max_attempts);
  generate->add_option("--seed", spec.seed);
  generate->add_option("--dtype", gen_dtype, "float32|float16")->check(CLI::IsMember({"float32", "float16"}));

  // pool
  std::string pool_in, pool_out;
  std::size_t pool_slots = 32;
  auto* pool = app.add_subcommand("pool", "Pool every document to exactly C vectors");
  pool->add_option("--corpus", pool_in, "Input bundle")->required();
  pool->add_option("--slots", pool_slots, "C");
  pool->add_option("--out", pool_out, "Output bundle")->required();

  // build
  std::string build_corpus, build_out, build_backend = "plaid";
  std::optional<std::size_t> b_nlist, b_nprobe, b_ptc, b_centroids, b_ncells, b_ndocs, b_iters;
  std::optional<double> b_threshold;
  std::optional<unsigned> b_bits;
  std::optional<std::uint64_t> b_seed;
  auto* build = app.add_subcommand("build", "Build an index over a bundle");
  build->add_option("--corpus", build_corpus, "Input bundle")->required();
  build->add_option("--backend", build_backend, "exact|ivf|plaid");
  build->add_option("--nlist", b_nlist);
  build->add_option("--nprobe", b_nprobe);
  build->add_option("--per-token-candidates", b_ptc);
  build->add_option("--num-centroids", b_centroids);
  build->add_option("--ncells", b_ncells);
  build->add_option("--threshold", b_threshold);
  build->add_option("--ndocs", b_ndocs);
  build->add_option("--residual-bits", b_bits);
  build->add_option("--kmeans-iters", b_iters);
  build->add_option("--seed", b_seed);
  build->add_option("--out", build_out, "Output index file")->required();

  // search
  IndexSource search_src;
  Overrides search_ov;
  std::string search_queries, search_out, search_tag = "latebench";
  std::size_t search_k = 1000;
  auto* search = app.add_subcommand("search", "Rank documents for every query; writes a TREC run");
  search_src.add_to(search);
  search->add_option("--queries", search_queries, "Query bundle")->required();
  search->add_option("--k", search_k, "Results per query");
  search->add_option("--tag", search_tag, "Run tag column");
  search_ov.add_to(search);
  search->add_option("--out", search_out, "Output run file")->required();

  // evaluate
  std::string eval_run, eval_qrels, eval_out;
  std::vector<std::string> eval_metrics;
  bool eval_strict = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score a run against qrels");
  evaluate->add_option("--run", eval_run)->required();
  evaluate->add_option("--qrels", eval_qrels)->required();
  evaluate->add_option("--metric", eval_metrics, "MRR@k, Recall@k or nDCG@k; repeatable");
  evaluate->add_flag("--strict", eval_strict, "Fail on run queries without judgments");
  evaluate->add_option("--out", eval_out)->required();

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Diagnostic tables");
  diagnose->require_subcommand(1);

  std::string cov_index, cov_corpus, cov_out;
  std::size_t cov_sample = 5000;
  std::uint64_t cov_seed = 42;
  auto* coverage = diagnose->add_subcommand("coverage", "Unique centroids per sampled document");
  coverage->add_option("--index", cov_index, "PLAID index")->required();
  coverage->add_option("--corpus", cov_corpus, "Bundle assigned to the index centroids (default: indexed docs)");
  coverage->add_option("--sample", cov_sample);
  coverage->add_option("--seed", cov_seed);
  coverage->add_option("--out", cov_out)->required();

  std::string grid_index, grid_queries, grid_qrels, grid_out, grid_ncells = "4,8,16,32,64",
                                                               grid_thresholds = "0.3,0.4,0.5";
  std::optional<std::size_t> grid_ndocs;
  std::size_t grid_k = 1000;
  auto* grid = diagnose->add_subcommand("grid", "PLAID (ncells x threshold) sweep at fixed ndocs");
  grid->add_option("--index", grid_index, "PLAID index")->required();
  grid->add_option("--queries", grid_queries)->required();
  grid->add_option("--qrels", grid_qrels)->required();
  grid->add_option("--ncells", grid_ncells, "Comma list");
  grid->add_option("--threshold", grid_thresholds, "Comma list");
  grid->add_option("--ndocs", grid_ndocs, "Fixed survivor cap (default: index value)");
  grid->add_option("--k", grid_k);
  grid->add_option("--out", grid_out)->required();

  IndexSource abl_src;
  Overrides abl_ov;
  std::string abl_queries, abl_qrels, abl_out, abl_lengths = "10,20,40,60,80,100,121";
  std::size_t abl_k = 1000;
  auto* ablation = diagnose->add_subcommand("ablation", "Metrics with queries truncated to their first L vectors");
  abl_src.add_to(ablation);
  ablation->add_option("--queries", abl_queries)->required();
  ablation->add_option("--qrels", abl_qrels)->required();
  ablation->add_option("--lengths", abl_lengths, "Comma list, strictly increasing");
  ablation->add_option("--k", abl_k);
  abl_ov.add_to(ablation);
  ablation->add_option("--out", abl_out)->required();

  std::string agr_a, agr_b, agr_qrels, agr_out;
  std::size_t agr_k = 10;
  auto* agreement = diagnose->add_subcommand("agreement", "Top-k overlap and metric deltas of two runs");
  agreement->add_option("--run-a", agr_a)->required();
  agreement->add_option("--run-b", agr_b)->required();
  agreement->add_option("--qrels", agr_qrels)->required();
  agreement->add_option("--k", agr_k);
  agreement->add_option("--out", agr_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "latebench: error: Usage (2): " << msg << "\n";
    return 2;
  }

  auto parse_list = [](const std::string& text, auto tag) {
    using T = decltype(tag);
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      T v{};
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
        usage("bad list entry '" + item + "' in '" + text + "'");
      }
      out.push_back(v);
    }
    if (out.empty()) usage("empty list");
    return out;
  };

  try {
    if (*generate) {
      Command cmd("generate");
      cmd.arg("--docs", gen_docs).arg("--queries", gen_queries).arg("--qrels", gen_qrels);
      cmd.arg("--doc-count", spec.doc_count).arg("--min-tokens", spec.min_tokens).arg("--max-tokens", spec.max_tokens);
      cmd.arg("--dim", spec.dim).arg("--num-concepts", spec.num_concepts).arg("--concepts-per-doc", spec.concepts_per_doc);
      cmd.arg("--query-count", spec.queries).arg("--signal-tokens", spec.signal_tokens);
      cmd.arg("--filler-fraction", spec.filler_fraction).arg("--margin", spec.margin);
      cmd.arg("--doc-noise", spec.doc_noise).arg("--query-noise", spec.query_noise);
      cmd.arg("--background-rate", spec.background_rate).arg("--background-noise", spec.background_noise);
      cmd.arg("--max-attempts", spec.max_attempts).arg("--seed", std::to_string(spec.seed)).arg("--dtype", gen_dtype);
      cmd.echo();
      lb_corpus* docs = nullptr;
      lb_corpus* queries = nullptr;
      lb_qrels* qrels = nullptr;
      check(lb_generate_synthetic(&spec, &docs, &queries, &qrels), "generate");
      Corpus d(docs), q(queries);
      Qrels r(qrels);
      const lb_dtype dtype = gen_dtype == "float16" ? LB_FLOAT16 : LB_FLOAT32;
      check(lb_corpus_write(d.get(), gen_docs.c_str(), dtype, cmd.header().c_str()), gen_docs);
      check(lb_corpus_write(q.get(), gen_queries.c_str(), dtype, cmd.header().c_str()), gen_queries);
      check(lb_qrels_write(r.get(), gen_qrels.c_str(), cmd.header().c_str()), gen_qrels);
      std::cerr << "latebench: wrote " << lb_corpus_size(d.get()) << " documents (" << lb_corpus_total_vectors(d.get())
                << " vectors), " << lb_corpus_size(q.get()) << " queries\n";
    } else if (*pool) {
      if (pool_slots == 0) usage("--slots must be >= 1");
      Command cmd("pool");
      cmd.arg("--corpus", pool_in).arg("--slots", pool_slots).arg("--out", pool_out);
      cmd.echo();
      Corpus in = read_corpus(pool_in);
      lb_corpus* pooled = nullptr;
      check(lb_corpus_pool_fixed(in.get(), pool_slots, &pooled), pool_in);
      Corpus out(pooled);
      check(lb_corpus_write(out.get(), pool_out.c_str(), LB_FLOAT32, cmd.header().c_str()), pool_out);
    } else if (*build) {
      lb_index_config cfg;
      const lb_backend backend = parse_backend(build_backend);
      lb_index_config_default(&cfg, backend);
      const bool ivf_flags = b_nlist || b_nprobe || b_ptc;
      const bool plaid_flags = b_centroids || b_ncells || b_threshold || b_ndocs || b_bits;
      if ((ivf_flags && backend != LB_IVF) || (plaid_flags && backend != LB_PLAID) ||
          (backend == LB_EXACT && (b_iters || b_seed))) {
        usage(std::string("flags given that do not apply to backend ") + backend_word(backend));
      }
      cfg.nlist = b_nlist.value_or(cfg.nlist);
      cfg.nprobe = b_nprobe.value_or(cfg.nprobe);
      cfg.per_token_candidates = b_ptc.value_or(cfg.per_token_candidates);
      cfg.num_centroids = b_centroids.value_or(cfg.num_centroids);
      cfg.ncells = b_ncells.value_or(cfg.ncells);
      cfg.threshold = b_threshold.value_or(cfg.threshold);
      cfg.ndocs = b_ndocs.value_or(cfg.ndocs);
      cfg.residual_bits = b_bits.value_or(cfg.residual_bits);
      cfg.kmeans_iters = b_iters.value_or(cfg.kmeans_iters);
      cfg.seed = b_seed.value_or(cfg.seed);
      Command cmd("build");
      cmd.arg("--corpus", build_corpus).arg("--backend", backend_word(backend));
      if (backend == LB_IVF) {
        cmd.arg("--nlist", cfg.nlist).arg("--nprobe", cfg.nprobe).arg("--per-token-candidates", cfg.per_token_candidates);
      } else if (backend == LB_PLAID) {
        cmd.arg("--num-centroids", cfg.num_centroids).arg("--ncells", cfg.ncells).arg("--threshold", cfg.threshold);
        cmd.arg("--ndocs", cfg.ndocs).arg("--residual-bits", std::size_t{cfg.residual_bits});
      }
      if (backend != LB_EXACT) cmd.arg("--kmeans-iters", cfg.kmeans_iters).arg("--seed", std::to_string(cfg.seed));
      cmd.arg("--out", build_out);
      cmd.echo();
      Corpus corpus = read_corpus(build_corpus);
      lb_index* idx = nullptr;
      check(lb_index_build(corpus.get(), &cfg, &idx), build_corpus);
      Index index(idx);
      check(lb_index_write(index.get(), build_out.c_str(), cmd.header().c_str()), build_out);
      if (backend == LB_PLAID) {
        lb_storage_report s;
        check(lb_index_storage(index.get(), &s), "storage");
        std::cerr << "latebench: storage vectors=" << s.vectors << " float16_bytes=" << s.raw_float16_bytes
                  << " compressed_bytes=" << s.compressed_bytes << " centroid_bytes=" << s.centroid_bytes
                  << " ratio=" << fmt(s.ratio) << "\n";
      }
    } else if (*search) {
      search_src.validate();
      require_k(search_k);
      if (search_tag.empty() || search_tag.find_first_of(" \t\n") != std::string::npos) {
        usage("--tag must be a single non-empty token");
      }
      Command cmd("search");
      Index index = search_src.load(cmd);
      cmd.arg("--queries", search_queries).arg("--k", search_k).arg("--tag", search_tag);
      const lb_search_params params = search_ov.resolve(index.get(), cmd);
      cmd.arg("--out", search_out);
      cmd.echo();
      Corpus queries = read_corpus(search_queries);
      lb_run* run = nullptr;
      check(lb_search(index.get(), queries.get(), search_k, &params, &run), search_queries);
      Run r(run);
      check(lb_run_write(r.get(), search_out.c_str(), search_tag.c_str(), cmd.header().c_str()), search_out);
      std::cerr << "latebench: wrote " << lb_run_query_count(r.get()) << " ranked lists to " << search_out << "\n";
    } else if (*evaluate) {
      std::vector<const char*> metrics;
      for (const auto& m : eval_metrics) metrics.push_back(m.c_str());
      Command cmd("evaluate");
      cmd.arg("--run", eval_run).arg("--qrels", eval_qrels);
      if (eval_metrics.empty()) {
        for (const char* m : {"MRR@10", "Recall@50", "Recall@1000", "nDCG@10"}) cmd.arg("--metric", std::string(m));
      }
      for (const auto& m : eval_metrics) cmd.arg("--metric", m);
      if (eval_strict) cmd.flag("--strict");
      cmd.arg("--out", eval_out);
      cmd.echo();
      Run run = read_run(eval_run);
      Qrels qrels = read_qrels(eval_qrels);
      lb_table* t = nullptr;
      check(lb_evaluate(run.get(), qrels.get(), metrics.data(), metrics.size(), eval_strict, &t), eval_run);
      Table table(t);
      write_table(table.get(), eval_out, cmd);
    } else if (*coverage) {
      Command cmd("diagnose coverage");
      cmd.arg("--index", cov_index);
      if (!cov_corpus.empty()) cmd.arg("--corpus", cov_corpus);
      cmd.arg("--sample", cov_sample).arg("--seed", std::to_string(cov_seed)).arg("--out", cov_out);
      cmd.echo();
      Index index = read_index(cov_index);
      Corpus corpus;
      if (!cov_corpus.empty()) corpus = read_corpus(cov_corpus);
      lb_table* t = nullptr;
      check(lb_diagnose_coverage(index.get(), corpus.get(), cov_sample, cov_seed, &t), cov_index);
      Table table(t);
      write_table(table.get(), cov_out, cmd);
    } else if (*grid) {
      const auto ncells = parse_list(grid_ncells, std::size_t{});
      const auto thresholds = parse_list(grid_thresholds, double{});
      require_k(grid_k);
      if (grid_ndocs && *grid_ndocs < grid_k) {
        throw Failure(LB_NDOCS_TOO_SMALL, "--ndocs " + std::to_string(*grid_ndocs) + " is below --k " +
                                              std::to_string(grid_k));
      }
      Command cmd("diagnose grid");
      Index index = read_index(grid_index);
      lb_index_config cfg;
      check(lb_index_get_config(index.get(), &cfg), grid_index);
      const std::size_t ndocs = grid_ndocs.value_or(cfg.ndocs);
      cmd.arg("--index", grid_index).arg("--queries", grid_queries).arg("--qrels", grid_qrels);
      cmd.arg("--ncells", join(ncells)).arg("--threshold", join(thresholds)).arg("--ndocs", ndocs);
      cmd.arg("--k", grid_k).arg("--out", grid_out);
      cmd.echo();
      Corpus queries = read_corpus(grid_queries);
      Qrels qrels = read_qrels(grid_qrels);
      lb_table* t = nullptr;
      check(lb_diagnose_grid(index.get(), queries.get(), qrels.get(), ncells.data(), ncells.size(), thresholds.data(),
                             thresholds.size(), ndocs, grid_k, &t),
            grid_index);
      Table table(t);
      write_table(table.get(), grid_out, cmd);
    } else if (*ablation) {
      abl_src.validate();
      const auto lengths = parse_list(abl_lengths, std::size_t{});
      require_k(abl_k);
      Command cmd("diagnose ablation");
      Index index = abl_src.load(cmd);
      cmd.arg("--queries", abl_queries).arg("--qrels", abl_qrels).arg("--lengths", join(lengths)).arg("--k", abl_k);
      const lb_search_params params = abl_ov.resolve(index.get(), cmd);
      cmd.arg("--out", abl_out);
      cmd.echo();
      Corpus queries = read_corpus(abl_queries);
      Qrels qrels = read_qrels(abl_qrels);
      lb_table* t = nullptr;
      check(lb_diagnose_ablation(index.get(), queries.get(), qrels.get(), lengths.data(), lengths.size(), abl_k,
                                 &params, &t),
            abl_queries);
      Table table(t);
      write_table(table.get(), abl_out, cmd);
    } else if (*agreement) {
      require_k(agr_k);
      Command cmd("diagnose agreement");
      cmd.arg("--run-a", agr_a).arg("--run-b", agr_b).arg("--qrels", agr_qrels).arg("--k", agr_k).arg("--out", agr_out);
      cmd.echo();
      Run a = read_run(agr_a);
      Run b = read_run(agr_b);
      Qrels qrels = read_qrels(agr_qrels);
      lb_table* t = nullptr;
      check(lb_diagnose_agreement(a.get(), b.get(), qrels.get(), agr_k, &t), "agreement");
      Table table(t);
      write_table(table.get(), agr_out, cmd);
    }
  } catch (const Failure& f) {
    std::string msg = f.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "latebench: error: " << lb_status_name(f.status) << " (" << static_cast<int>(f.status)
              << "): " << msg << "\n";
    return static_cast<int>(f.status);
  }
  return 0;
}
