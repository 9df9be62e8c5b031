#include "latebench/index_io.hpp"

#include <charconv>

#include "byte_io.hpp"
#include "latebench/bundle.hpp"
#include "latebench/file_util.hpp"
#include "latebench/trec_io.hpp"

namespace latebench {

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::kExact: return "exact";
    case Backend::kIvf: return "ivf";
    case Backend::kPlaid: return "plaid";
  }
  return "exact";
}

Backend parse_backend(std::string_view name) {
  if (name == "exact") return Backend::kExact;
  if (name == "ivf") return Backend::kIvf;
  if (name == "plaid") return Backend::kPlaid;
  fail(ErrorCode::kInvalidArgument, "unknown backend '" + std::string(name) + "' (exact|ivf|plaid)");
}

const Retriever& AnyIndex::retriever() const {
  switch (backend) {
    case Backend::kIvf: return *ivf;
    case Backend::kPlaid: return *plaid;
    case Backend::kExact: break;
  }
  return *exact;
}

std::size_t AnyIndex::dim() const { return retriever().dim(); }

std::size_t AnyIndex::doc_count() const {
  if (backend == Backend::kPlaid) return plaid->doc_count();
  return corpus->size();
}

AnyIndex make_exact_index(std::shared_ptr<const Corpus> corpus) {
  AnyIndex idx;
  idx.backend = Backend::kExact;
  idx.exact = std::make_shared<const ExactRetriever>(corpus);
  idx.corpus = std::move(corpus);
  return idx;
}

namespace {

void put_line(std::string& out, std::string_view key, const std::string& value) {
  out.append(key);
  out += ' ';
  out += value;
  out += '\n';
}

void put_centroids_and_codes(std::string& out, const TokenMatrix& centroids, const std::vector<std::uint32_t>& codes) {
  for (float v : centroids.data()) detail::put_f32(out, v);
  for (std::uint32_t c : codes) detail::put_u32(out, c);
}

double to_double(detail::HeaderReader& reader, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) reader.malformed("bad number '" + s + "'");
  return v;
}

class PayloadCursor {
 public:
  PayloadCursor(std::string_view bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  const char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::kTruncatedPayload, "index payload ends early");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::string_view rest() const { return bytes_.substr(pos_); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

}  // namespace

std::string write_index(const AnyIndex& index, const std::vector<std::string>& comments) {
  std::string out;
  out += kIndexMagic;
  out += "\nversion " + std::to_string(kIndexVersion) + "\n";
  for (const auto& c : comments) out += comment_block(c);
  put_line(out, "backend", std::string(backend_name(index.backend)));

  const TokenMatrix* centroids = nullptr;
  const std::vector<std::uint32_t>* codes = nullptr;
  bool embed_corpus = true;
  std::size_t dim = 0;
  std::size_t vectors = 0;
  switch (index.backend) {
    case Backend::kExact:
      dim = index.corpus->dim();
      vectors = index.corpus->manifest().total_vectors;
      break;
    case Backend::kIvf: {
      const IvfConfig& c = index.ivf->config();
      put_line(out, "nlist", std::to_string(c.nlist));
      put_line(out, "nprobe", std::to_string(c.nprobe));
      put_line(out, "per_token_candidates", std::to_string(c.per_token_candidates));
      put_line(out, "kmeans_iters", std::to_string(c.kmeans_iters));
      put_line(out, "seed", std::to_string(c.seed));
      centroids = &index.ivf->centroids();
      codes = &index.ivf->assignment();
      dim = index.ivf->dim();
      vectors = codes->size();
      break;
    }
    case Backend::kPlaid: {
      const PlaidConfig& c = index.plaid->config();
      put_line(out, "num_centroids", std::to_string(c.num_centroids));
      put_line(out, "ncells", std::to_string(c.ncells));
      put_line(out, "centroid_score_threshold", format_score(c.centroid_score_threshold));
      put_line(out, "ndocs", std::to_string(c.ndocs));
      put_line(out, "residual_bits", std::to_string(c.residual_bits));
      put_line(out, "kmeans_iters", std::to_string(c.kmeans_iters));
      put_line(out, "seed", std::to_string(c.seed));
      centroids = &index.plaid->centroids();
      codes = &index.plaid->codes();
      dim = index.plaid->dim();
      vectors = codes->size();
      embed_corpus = !index.plaid->has_residuals();
      break;
    }
  }
  put_line(out, "dim", std::to_string(dim));
  put_line(out, "centroids", std::to_string(centroids ? centroids->rows() : 0));
  put_line(out, "vectors", std::to_string(vectors));
  put_line(out, "corpus", embed_corpus ? "embedded" : "omitted");
  if (!embed_corpus) {
    const PlaidIndex& p = *index.plaid;
    for (std::size_t d = 0; d < p.doc_count(); ++d) {
      out += "doc " + p.doc_ids()[d] + " " + std::to_string(p.doc_rows(d)) + "\n";
    }
  }
  out += "end\n";

  if (centroids) put_centroids_and_codes(out, *centroids, *codes);
  if (index.backend == Backend::kPlaid && index.plaid->has_residuals()) {
    for (const ResidualCode& r : index.plaid->residuals()) {
      detail::put_f32(out, r.scale);
      out.append(reinterpret_cast<const char*>(r.packed.data()), r.packed.size());
    }
  }
  if (embed_corpus) {
    const Corpus& corpus = index.backend == Backend::kPlaid ? *index.plaid->shared_corpus() : *index.corpus;
    out += write_bundle(corpus);
  }
  return out;
}

AnyIndex read_index(std::string_view bytes) {
  detail::HeaderReader reader(bytes, kIndexMagic, kIndexVersion);
  AnyIndex idx;
  idx.backend = parse_backend(reader.expect_word("backend"));
  IvfConfig ivf;
  PlaidConfig plaid;
  if (idx.backend == Backend::kIvf) {
    ivf.nlist = reader.expect_size("nlist");
    ivf.nprobe = reader.expect_size("nprobe");
    ivf.per_token_candidates = reader.expect_size("per_token_candidates");
    ivf.kmeans_iters = reader.expect_size("kmeans_iters");
    ivf.seed = reader.expect_size("seed");
  } else if (idx.backend == Backend::kPlaid) {
    plaid.num_centroids = reader.expect_size("num_centroids");
    plaid.ncells = reader.expect_size("ncells");
    plaid.centroid_score_threshold = to_double(reader, reader.expect_word("centroid_score_threshold"));
    plaid.ndocs = reader.expect_size("ndocs");
    plaid.residual_bits = static_cast<unsigned>(reader.expect_size("residual_bits"));
    plaid.kmeans_iters = reader.expect_size("kmeans_iters");
    plaid.seed = reader.expect_size("seed");
  }
  const std::size_t dim = reader.expect_size("dim");
  const std::size_t num_centroids = reader.expect_size("centroids");
  const std::size_t vectors = reader.expect_size("vectors");
  const std::string corpus_mode = reader.expect_word("corpus");
  if (corpus_mode != "embedded" && corpus_mode != "omitted") reader.malformed("corpus must be embedded|omitted");
  const bool embedded = corpus_mode == "embedded";
  if (!embedded && !(idx.backend == Backend::kPlaid && plaid.residual_bits > 0)) {
    reader.malformed("only residual-coded plaid indexes may omit the corpus");
  }
  std::vector<std::string> doc_ids;
  std::vector<std::size_t> doc_rows;
  while (!embedded && reader.peek_key() == "doc") {
    const auto f = reader.expect_fields("doc", 2);
    doc_ids.push_back(f[0]);
    doc_rows.push_back(reader.to_size(f[1]));
  }
  reader.expect_end();

  PayloadCursor cur(bytes, reader.position());
  TokenMatrix centroids(num_centroids, dim);
  std::vector<std::uint32_t> codes;
  if (idx.backend != Backend::kExact) {
    const char* p = cur.take(num_centroids * dim * 4);
    for (float& v : centroids.data()) {
      v = detail::get_f32(p);
      p += 4;
    }
    codes.resize(vectors);
    p = cur.take(vectors * 4);
    for (auto& c : codes) {
      c = detail::get_u32(p);
      p += 4;
    }
  }
  std::vector<ResidualCode> residuals;
  if (idx.backend == Backend::kPlaid && plaid.residual_bits > 0) {
    check_residual_bits(plaid.residual_bits);
    const std::size_t packed = packed_residual_bytes(dim, plaid.residual_bits);
    residuals.resize(vectors);
    for (auto& r : residuals) {
      r.scale = detail::get_f32(cur.take(4));
      const auto* b = reinterpret_cast<const std::uint8_t*>(cur.take(packed));
      r.packed.assign(b, b + packed);
    }
  }
  std::shared_ptr<const Corpus> corpus;
  if (embedded) {
    corpus = std::make_shared<const Corpus>(read_bundle(cur.rest()));
    if (corpus->dim() != dim || corpus->manifest().total_vectors != vectors) {
      fail(ErrorCode::kInvalidArgument, "embedded corpus does not match the index header");
    }
    doc_ids = corpus->ids();
    doc_rows.clear();
    for (const auto& d : corpus->docs()) doc_rows.push_back(d.rows());
  } else if (!cur.done()) {
    fail(ErrorCode::kTruncatedPayload, "trailing bytes after index payload");
  }

  switch (idx.backend) {
    case Backend::kExact:
      return make_exact_index(std::move(corpus));
    case Backend::kIvf:
      idx.corpus = corpus;
      idx.ivf = std::make_shared<const IvfIndex>(std::move(corpus), ivf, std::move(centroids), std::move(codes));
      return idx;
    case Backend::kPlaid:
      idx.corpus = corpus;
      idx.plaid = std::make_shared<const PlaidIndex>(plaid, std::move(centroids), std::move(doc_ids),
                                                     std::move(doc_rows), std::move(codes), std::move(residuals),
                                                     std::move(corpus));
      return idx;
  }
  return idx;
}

}  // namespace latebench
