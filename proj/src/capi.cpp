#include "latebench/latebench.h"

#include <memory>
#include <new>
#include <string>

#include "latebench/bundle.hpp"
#include "latebench/diagnostics.hpp"
#include "latebench/file_util.hpp"
#include "latebench/index_io.hpp"
#include "latebench/synthetic.hpp"
#include "latebench/trec_io.hpp"

using namespace latebench;

struct lb_corpus {
  std::shared_ptr<const Corpus> corpus;
};
struct lb_qrels {
  Qrels qrels;
};
struct lb_run {
  Run run;
};
struct lb_index {
  AnyIndex index;
};
struct lb_table {
  std::string text;
  std::size_t rows = 0;
};

namespace {

thread_local std::string last_error;

template <class F>
lb_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LB_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<lb_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LB_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LB_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

std::string header_block(const char* header) { return header ? comment_block(header) : std::string(); }

std::vector<std::string> header_lines(const char* header) {
  std::vector<std::string> out;
  if (header && *header) out.emplace_back(header);
  return out;
}

lb_table* make_table(std::string text) {
  auto* t = new lb_table{std::move(text), 0};
  std::size_t lines = 0;
  for (char c : t->text) lines += c == '\n';
  t->rows = lines > 0 ? lines - 1 : 0;
  return t;
}

std::shared_ptr<const Retriever> make_retriever(const AnyIndex& idx, const lb_search_params* p) {
  switch (idx.backend) {
    case Backend::kIvf: {
      IvfSearchParams sp;
      if (p && p->nprobe) sp.nprobe = p->nprobe;
      if (p && p->per_token_candidates) sp.per_token_candidates = p->per_token_candidates;
      return std::make_shared<IvfRetriever>(idx.ivf, sp);
    }
    case Backend::kPlaid: {
      PlaidSearchParams sp;
      if (p && p->ncells) sp.ncells = p->ncells;
      if (p && p->ndocs) sp.ndocs = p->ndocs;
      if (p && p->has_threshold) sp.centroid_score_threshold = p->threshold;
      return std::make_shared<PlaidRetriever>(idx.plaid, sp);
    }
    case Backend::kExact:
      break;
  }
  return idx.exact;
}

}  // namespace

extern "C" {

const char* lb_version(void) { return LATEBENCH_VERSION; }

const char* lb_last_error(void) { return last_error.c_str(); }

const char* lb_status_name(lb_status status) {
  if (status == LB_INTERNAL) return "Internal";
  return error_name(static_cast<ErrorCode>(status)).data();
}

void lb_set_warning_handler(void (*handler)(const char*, void*), void* user) {
  if (!handler) {
    set_warning_handler(nullptr);
    return;
  }
  set_warning_handler([handler, user](std::string_view msg) { handler(std::string(msg).c_str(), user); });
}

lb_status lb_corpus_read(const char* path, lb_corpus** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lb_corpus{std::make_shared<const Corpus>(read_bundle(read_file(path)))};
  });
}

lb_status lb_corpus_write(const lb_corpus* corpus, const char* path, lb_dtype dtype, const char* header) {
  return guarded([&] {
    need(corpus, "corpus");
    need(path, "path");
    const Corpus& c = *corpus->corpus;
    const Dtype want = dtype == LB_FLOAT16 ? Dtype::kFloat16 : Dtype::kFloat32;
    if (want == c.manifest().dtype) {
      write_file_atomic(path, write_bundle(c, header_lines(header)));
      return;
    }
    const Corpus converted(c.ids(), c.docs(), {.dtype = want, .pooling = c.manifest().pooling, .slots = c.manifest().slots});
    write_file_atomic(path, write_bundle(converted, header_lines(header)));
  });
}

lb_status lb_corpus_pool_fixed(const lb_corpus* corpus, size_t slots, lb_corpus** out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(out, "out");
    *out = new lb_corpus{std::make_shared<const Corpus>(pool_corpus(*corpus->corpus, slots))};
  });
}

size_t lb_corpus_size(const lb_corpus* corpus) { return corpus ? corpus->corpus->size() : 0; }
size_t lb_corpus_dim(const lb_corpus* corpus) { return corpus ? corpus->corpus->dim() : 0; }
size_t lb_corpus_total_vectors(const lb_corpus* corpus) {
  return corpus ? corpus->corpus->manifest().total_vectors : 0;
}
void lb_corpus_free(lb_corpus* corpus) { delete corpus; }

void lb_synthetic_spec_default(lb_synthetic_spec* spec) {
  if (!spec) return;
  const SyntheticSpec d;
  *spec = {d.doc_count,  d.min_tokens,      d.max_tokens,  d.dim,        d.num_concepts,
           d.concepts_per_doc, d.queries,   d.signal_tokens, d.filler_fraction, d.margin,
           d.doc_noise,  d.query_noise,     d.background_rate, d.background_noise, d.seed,
           d.max_attempts};
}

lb_status lb_generate_synthetic(const lb_synthetic_spec* spec, lb_corpus** docs, lb_corpus** queries,
                                lb_qrels** qrels) {
  return guarded([&] {
    need(spec, "spec");
    need(docs, "docs");
    need(queries, "queries");
    need(qrels, "qrels");
    SyntheticSpec s;
    s.doc_count = spec->doc_count;
    s.min_tokens = spec->min_tokens;
    s.max_tokens = spec->max_tokens;
    s.dim = spec->dim;
    s.num_concepts = spec->num_concepts;
    s.concepts_per_doc = spec->concepts_per_doc;
    s.queries = spec->queries;
    s.signal_tokens = spec->signal_tokens;
    s.filler_fraction = spec->filler_fraction;
    s.margin = spec->margin;
    s.doc_noise = spec->doc_noise;
    s.query_noise = spec->query_noise;
    s.background_rate = spec->background_rate;
    s.background_noise = spec->background_noise;
    s.seed = spec->seed;
    s.max_attempts = spec->max_attempts;
    SyntheticData data = generate_synthetic(s);
    auto d = std::make_unique<lb_corpus>(lb_corpus{std::make_shared<const Corpus>(std::move(data.corpus))});
    auto q = std::make_unique<lb_corpus>(lb_corpus{std::make_shared<const Corpus>(std::move(data.queries))});
    *qrels = new lb_qrels{std::move(data.qrels)};
    *docs = d.release();
    *queries = q.release();
  });
}

lb_status lb_qrels_read(const char* path, lb_qrels** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lb_qrels{parse_qrels(read_file(path))};
  });
}

lb_status lb_qrels_write(const lb_qrels* qrels, const char* path, const char* header) {
  return guarded([&] {
    need(qrels, "qrels");
    need(path, "path");
    write_file_atomic(path, header_block(header) + write_qrels(qrels->qrels));
  });
}

void lb_qrels_free(lb_qrels* qrels) { delete qrels; }

void lb_index_config_default(lb_index_config* config, lb_backend backend) {
  if (!config) return;
  const IvfConfig ivf;
  const PlaidConfig plaid;
  config->backend = backend;
  config->nlist = ivf.nlist;
  config->nprobe = ivf.nprobe;
  config->per_token_candidates = ivf.per_token_candidates;
  config->num_centroids = plaid.num_centroids;
  config->ncells = plaid.ncells;
  config->threshold = plaid.centroid_score_threshold;
  config->ndocs = plaid.ndocs;
  config->residual_bits = plaid.residual_bits;
  config->kmeans_iters = backend == LB_IVF ? ivf.kmeans_iters : plaid.kmeans_iters;
  config->seed = backend == LB_IVF ? ivf.seed : plaid.seed;
}

lb_status lb_index_build(const lb_corpus* corpus, const lb_index_config* config, lb_index** out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(config, "config");
    need(out, "out");
    AnyIndex idx;
    switch (config->backend) {
      case LB_EXACT:
        idx = make_exact_index(corpus->corpus);
        break;
      case LB_IVF: {
        IvfConfig c;
        c.nlist = config->nlist;
        c.nprobe = config->nprobe;
        c.per_token_candidates = config->per_token_candidates;
        c.kmeans_iters = config->kmeans_iters;
        c.seed = config->seed;
        idx.backend = Backend::kIvf;
        idx.corpus = corpus->corpus;
        idx.ivf = std::make_shared<const IvfIndex>(IvfIndex::build(corpus->corpus, c));
        break;
      }
      case LB_PLAID: {
        PlaidConfig c;
        c.num_centroids = config->num_centroids;
        c.ncells = config->ncells;
        c.centroid_score_threshold = config->threshold;
        c.ndocs = config->ndocs;
        c.residual_bits = config->residual_bits;
        c.kmeans_iters = config->kmeans_iters;
        c.seed = config->seed;
        idx.backend = Backend::kPlaid;
        idx.corpus = corpus->corpus;
        idx.plaid = std::make_shared<const PlaidIndex>(PlaidIndex::build(corpus->corpus, c));
        break;
      }
      default:
        fail(ErrorCode::kInvalidArgument, "unknown backend " + std::to_string(config->backend));
    }
    *out = new lb_index{std::move(idx)};
  });
}

lb_status lb_index_read(const char* path, lb_index** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lb_index{read_index(read_file(path))};
  });
}

lb_status lb_index_write(const lb_index* index, const char* path, const char* header) {
  return guarded([&] {
    need(index, "index");
    need(path, "path");
    write_file_atomic(path, write_index(index->index, header_lines(header)));
  });
}

lb_status lb_index_get_config(const lb_index* index, lb_index_config* out) {
  return guarded([&] {
    need(index, "index");
    need(out, "out");
    const AnyIndex& idx = index->index;
    switch (idx.backend) {
      case Backend::kExact:
        lb_index_config_default(out, LB_EXACT);
        break;
      case Backend::kIvf: {
        lb_index_config_default(out, LB_IVF);
        const IvfConfig& c = idx.ivf->config();
        out->nlist = c.nlist;
        out->nprobe = c.nprobe;
        out->per_token_candidates = c.per_token_candidates;
        out->kmeans_iters = c.kmeans_iters;
        out->seed = c.seed;
        break;
      }
      case Backend::kPlaid: {
        lb_index_config_default(out, LB_PLAID);
        const PlaidConfig& c = idx.plaid->config();
        out->num_centroids = c.num_centroids;
        out->ncells = c.ncells;
        out->threshold = c.centroid_score_threshold;
        out->ndocs = c.ndocs;
        out->residual_bits = c.residual_bits;
        out->kmeans_iters = c.kmeans_iters;
        out->seed = c.seed;
        break;
      }
    }
  });
}

void lb_index_free(lb_index* index) { delete index; }

lb_status lb_index_storage(const lb_index* index, lb_storage_report* out) {
  return guarded([&] {
    need(index, "index");
    need(out, "out");
    if (index->index.backend != Backend::kPlaid) {
      fail(ErrorCode::kInvalidArgument, "storage accounting needs a plaid index");
    }
    const StorageReport r = index->index.plaid->storage();
    *out = {r.vectors, r.raw_float32_bytes, r.raw_float16_bytes, r.compressed_bytes, r.centroid_bytes, r.ratio};
  });
}

lb_status lb_search(const lb_index* index, const lb_corpus* queries, size_t k, const lb_search_params* params,
                    lb_run** out) {
  return guarded([&] {
    need(index, "index");
    need(queries, "queries");
    need(out, "out");
    const auto retriever = make_retriever(index->index, params);
    *out = new lb_run{search_all(*retriever, *queries->corpus, k)};
  });
}

lb_status lb_run_read(const char* path, lb_run** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lb_run{parse_run(read_file(path))};
  });
}

lb_status lb_run_write(const lb_run* run, const char* path, const char* tag, const char* header) {
  return guarded([&] {
    need(run, "run");
    need(path, "path");
    write_file_atomic(path, header_block(header) + write_run(run->run, tag ? tag : "latebench"));
  });
}

size_t lb_run_query_count(const lb_run* run) { return run ? run->run.lists.size() : 0; }
void lb_run_free(lb_run* run) { delete run; }

lb_status lb_evaluate(const lb_run* run, const lb_qrels* qrels, const char* const* metrics, size_t metric_count,
                      int strict, lb_table** out) {
  return guarded([&] {
    need(run, "run");
    need(qrels, "qrels");
    need(out, "out");
    std::vector<MetricSpec> specs;
    for (size_t i = 0; metrics && i < metric_count; ++i) {
      need(metrics[i], "metric");
      specs.push_back(MetricSpec::parse(metrics[i]));
    }
    if (specs.empty()) specs = default_metric_specs();
    const EvaluationReport rep = evaluate_run(run->run, qrels->qrels, specs, {.strict = strict != 0});
    *out = make_table(rep.to_tsv());
  });
}

lb_status lb_diagnose_coverage(const lb_index* index, const lb_corpus* corpus, size_t sample, uint64_t seed,
                               lb_table** out) {
  return guarded([&] {
    need(index, "index");
    need(out, "out");
    if (index->index.backend != Backend::kPlaid) fail(ErrorCode::kInvalidArgument, "coverage needs a plaid index");
    const PlaidIndex& p = *index->index.plaid;
    const CoverageReport r =
        corpus ? centroid_coverage(p, *corpus->corpus, sample, seed) : centroid_coverage(p, sample, seed);
    *out = make_table(r.to_tsv());
  });
}

lb_status lb_diagnose_grid(const lb_index* index, const lb_corpus* queries, const lb_qrels* qrels,
                           const size_t* ncells, size_t ncells_count, const double* thresholds,
                           size_t threshold_count, size_t ndocs, size_t k, lb_table** out) {
  return guarded([&] {
    need(index, "index");
    need(queries, "queries");
    need(qrels, "qrels");
    need(out, "out");
    if (index->index.backend != Backend::kPlaid) fail(ErrorCode::kInvalidArgument, "grid needs a plaid index");
    std::vector<std::size_t> nc(ncells, ncells + (ncells ? ncells_count : 0));
    std::vector<double> th(thresholds, thresholds + (thresholds ? threshold_count : 0));
    const GridResult g = grid_search(*index->index.plaid, *queries->corpus, qrels->qrels, nc, th, ndocs, k);
    *out = make_table(g.to_tsv());
  });
}

lb_status lb_diagnose_ablation(const lb_index* index, const lb_corpus* queries, const lb_qrels* qrels,
                               const size_t* lengths, size_t length_count, size_t k,
                               const lb_search_params* params, lb_table** out) {
  return guarded([&] {
    need(index, "index");
    need(queries, "queries");
    need(qrels, "qrels");
    need(out, "out");
    std::vector<std::size_t> ls(lengths, lengths + (lengths ? length_count : 0));
    const auto retriever = make_retriever(index->index, params);
    *out = make_table(truncation_ablation(*retriever, *queries->corpus, qrels->qrels, ls, k).to_tsv());
  });
}

lb_status lb_diagnose_agreement(const lb_run* a, const lb_run* b, const lb_qrels* qrels, size_t k, lb_table** out) {
  return guarded([&] {
    need(a, "run a");
    need(b, "run b");
    need(qrels, "qrels");
    need(out, "out");
    *out = make_table(compare_runs(a->run, b->run, qrels->qrels, k).to_tsv());
  });
}

const char* lb_table_text(const lb_table* table) { return table ? table->text.c_str() : ""; }
size_t lb_table_rows(const lb_table* table) { return table ? table->rows : 0; }

lb_status lb_table_write(const lb_table* table, const char* path, const char* header) {
  return guarded([&] {
    need(table, "table");
    need(path, "path");
    write_file_atomic(path, header_block(header) + table->text);
  });
}

void lb_table_free(lb_table* table) { delete table; }

}  // extern "C"
