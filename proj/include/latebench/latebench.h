#ifndef LATEBENCH_LATEBENCH_H
#define LATEBENCH_LATEBENCH_H

/* C interface to the latebench retrieval engine.
 *
 * Every fallible call returns an lb_status; on failure lb_last_error()
 * holds a one-line description for the calling thread. Handles are opaque
 * and owned by the caller, who releases them with the matching *_free.
 * Files are written atomically (temp file + rename). The optional `header`
 * argument of the write calls is stored as '#' comment lines. */

#include <stddef.h>
#include <stdint.h>

#if defined(LATEBENCH_BUILDING_LIBRARY)
#define LB_API __attribute__((visibility("default")))
#else
#define LB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lb_status {
  LB_OK = 0,
  LB_INVALID_ARGUMENT = 1,
  LB_NOT_NORMALIZED = 2,
  LB_NON_FINITE = 3,
  LB_EMPTY_MATRIX = 4,
  LB_DIMENSION_MISMATCH = 5,
  LB_EMPTY_CORPUS = 6,
  LB_TOO_FEW_VECTORS = 7,
  LB_NDOCS_TOO_SMALL = 8,
  LB_UNKNOWN_DOC = 9,
  LB_UNSUPPORTED_BITS = 10,
  LB_QUERY_MISSING_FROM_QRELS = 11,
  LB_ZERO_RELEVANT = 12,
  LB_EMPTY_LENGTHS = 13,
  LB_NO_SHARED_QUERIES = 14,
  LB_EMPTY_INDEX = 15,
  LB_BAD_MAGIC = 16,
  LB_VERSION_MISMATCH = 17,
  LB_TRUNCATED_PAYLOAD = 18,
  LB_OFFSET_OVERLAP = 19,
  LB_MALFORMED_LINE = 20,
  LB_DUPLICATE_JUDGMENT = 21,
  LB_NON_CONTIGUOUS_RANKS = 22,
  LB_SPEC_INFEASIBLE = 23,
  LB_IO = 24,
  LB_INTERNAL = 99
} lb_status;

typedef enum lb_dtype { LB_FLOAT32 = 0, LB_FLOAT16 = 1 } lb_dtype;
typedef enum lb_backend { LB_EXACT = 0, LB_IVF = 1, LB_PLAID = 2 } lb_backend;

typedef struct lb_corpus lb_corpus;
typedef struct lb_qrels lb_qrels;
typedef struct lb_run lb_run;
typedef struct lb_index lb_index;
typedef struct lb_table lb_table;

LB_API const char* lb_version(void);
LB_API const char* lb_last_error(void);
/* Stable identifier such as "NDocsTooSmall". */
LB_API const char* lb_status_name(lb_status status);
/* Receives library warnings; NULL restores printing to stderr. */
LB_API void lb_set_warning_handler(void (*handler)(const char* message, void* user), void* user);

/* Embedding bundles (documents or queries). */
LB_API lb_status lb_corpus_read(const char* path, lb_corpus** out);
LB_API lb_status lb_corpus_write(const lb_corpus* corpus, const char* path, lb_dtype dtype, const char* header);
LB_API lb_status lb_corpus_pool_fixed(const lb_corpus* corpus, size_t slots, lb_corpus** out);
LB_API size_t lb_corpus_size(const lb_corpus* corpus);
LB_API size_t lb_corpus_dim(const lb_corpus* corpus);
LB_API size_t lb_corpus_total_vectors(const lb_corpus* corpus);
LB_API void lb_corpus_free(lb_corpus* corpus);

typedef struct lb_synthetic_spec {
  size_t doc_count;
  size_t min_tokens;
  size_t max_tokens;
  size_t dim;
  size_t num_concepts;
  size_t concepts_per_doc;
  size_t queries;
  size_t signal_tokens;
  double filler_fraction;
  double margin;
  double doc_noise;
  double query_noise;
  double background_rate;
  double background_noise;
  uint64_t seed;
  size_t max_attempts;
} lb_synthetic_spec;

LB_API void lb_synthetic_spec_default(lb_synthetic_spec* spec);
LB_API lb_status lb_generate_synthetic(const lb_synthetic_spec* spec, lb_corpus** docs, lb_corpus** queries,
                                       lb_qrels** qrels);

LB_API lb_status lb_qrels_read(const char* path, lb_qrels** out);
LB_API lb_status lb_qrels_write(const lb_qrels* qrels, const char* path, const char* header);
LB_API void lb_qrels_free(lb_qrels* qrels);

typedef struct lb_index_config {
  lb_backend backend;
  /* ivf */
  size_t nlist;
  size_t nprobe;
  size_t per_token_candidates;
  /* plaid */
  size_t num_centroids;
  size_t ncells;
  double threshold;
  size_t ndocs;
  unsigned residual_bits;
  /* shared clustering */
  size_t kmeans_iters;
  uint64_t seed;
} lb_index_config;

LB_API void lb_index_config_default(lb_index_config* config, lb_backend backend);
LB_API lb_status lb_index_build(const lb_corpus* corpus, const lb_index_config* config, lb_index** out);
LB_API lb_status lb_index_read(const char* path, lb_index** out);
LB_API lb_status lb_index_write(const lb_index* index, const char* path, const char* header);
LB_API lb_status lb_index_get_config(const lb_index* index, lb_index_config* out);
LB_API void lb_index_free(lb_index* index);

typedef struct lb_storage_report {
  size_t vectors;
  size_t raw_float32_bytes;
  size_t raw_float16_bytes;
  size_t compressed_bytes;
  size_t centroid_bytes;
  double ratio;
} lb_storage_report;

/* PLAID indexes only. */
LB_API lb_status lb_index_storage(const lb_index* index, lb_storage_report* out);

/* Per-search overrides; zero (or has_threshold == 0) keeps the index value. */
typedef struct lb_search_params {
  size_t nprobe;
  size_t per_token_candidates;
  size_t ncells;
  size_t ndocs;
  int has_threshold;
  double threshold;
} lb_search_params;

LB_API lb_status lb_search(const lb_index* index, const lb_corpus* queries, size_t k, const lb_search_params* params,
                           lb_run** out);

LB_API lb_status lb_run_read(const char* path, lb_run** out);
LB_API lb_status lb_run_write(const lb_run* run, const char* path, const char* tag, const char* header);
LB_API size_t lb_run_query_count(const lb_run* run);
LB_API void lb_run_free(lb_run* run);

/* metrics: strings such as "MRR@10"; NULL/0 selects MRR@10, Recall@50,
 * Recall@1000, nDCG@10. strict turns unjudged run queries into errors. */
LB_API lb_status lb_evaluate(const lb_run* run, const lb_qrels* qrels, const char* const* metrics, size_t metric_count,
                             int strict, lb_table** out);

/* corpus may be NULL to sample the index's own documents. */
LB_API lb_status lb_diagnose_coverage(const lb_index* index, const lb_corpus* corpus, size_t sample, uint64_t seed,
                                      lb_table** out);
LB_API lb_status lb_diagnose_grid(const lb_index* index, const lb_corpus* queries, const lb_qrels* qrels,
                                  const size_t* ncells, size_t ncells_count, const double* thresholds,
                                  size_t threshold_count, size_t ndocs, size_t k, lb_table** out);
LB_API lb_status lb_diagnose_ablation(const lb_index* index, const lb_corpus* queries, const lb_qrels* qrels,
                                      const size_t* lengths, size_t length_count, size_t k,
                                      const lb_search_params* params, lb_table** out);
LB_API lb_status lb_diagnose_agreement(const lb_run* a, const lb_run* b, const lb_qrels* qrels, size_t k,
                                       lb_table** out);

/* Tab-separated text with one header line. */
LB_API const char* lb_table_text(const lb_table* table);
LB_API size_t lb_table_rows(const lb_table* table);
LB_API lb_status lb_table_write(const lb_table* table, const char* path, const char* header);
LB_API void lb_table_free(lb_table* table);

#ifdef __cplusplus
}
#endif

#endif
