#include "latebench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "latebench/parallel.hpp"

namespace latebench {

void SyntheticSpec::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidArgument, "synthetic spec: " + what); };
  if (doc_count == 0) bad("doc_count must be >= 1");
  if (min_tokens == 0 || min_tokens > max_tokens) bad("need 1 <= min_tokens <= max_tokens");
  if (dim == 0) bad("dim must be >= 1");
  if (concepts_per_doc == 0 || concepts_per_doc > num_concepts) bad("need 1 <= concepts_per_doc <= num_concepts");
  if (queries == 0 || queries > doc_count) bad("need 1 <= queries <= doc_count (targets are distinct)");
  if (signal_tokens == 0) bad("signal_tokens must be >= 1");
  if (!(filler_fraction >= 0.0 && filler_fraction < 1.0)) bad("filler_fraction must lie in [0, 1)");
  if (!(margin > 0.0)) bad("margin must be > 0");
  if (!(doc_noise >= 0.0 && query_noise >= 0.0 && background_noise >= 0.0)) bad("noise scales must be >= 0");
  if (!(background_rate >= 0.0 && background_rate < 1.0)) bad("background_rate must lie in [0, 1)");
  if (max_attempts == 0) bad("max_attempts must be >= 1");
}

std::size_t SyntheticSpec::filler_tokens() const {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(signal_tokens) * filler_fraction / (1.0 - filler_fraction)));
}

namespace {

using Rng = std::mt19937_64;

std::vector<float> random_unit(Rng& rng, std::size_t dim) {
  std::normal_distribution<float> normal;
  std::vector<float> v(dim);
  do {
    for (float& x : v) x = normal(rng);
  } while (!normalize(v));
  return v;
}

// normalize(center + scale * g / sqrt(dim)) written into out.
void perturb(std::span<const float> center, double scale, Rng& rng, std::span<float> out) {
  std::normal_distribution<double> normal;
  const double s = scale / std::sqrt(static_cast<double>(center.size()));
  do {
    for (std::size_t c = 0; c < center.size(); ++c) out[c] = static_cast<float>(center[c] + s * normal(rng));
  } while (!normalize(out));
}

std::string padded(char prefix, std::size_t n, int width) {
  std::string digits = std::to_string(n);
  if (digits.size() < static_cast<std::size_t>(width)) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

struct Doc {
  TokenMatrix rows;
  std::vector<std::size_t> concept_rows;  // row indices holding concept tokens
};

struct Query {
  TokenMatrix rows;
  double margin = 0.0;
  double relative_margin = 0.0;
};

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t dim = spec.dim;
  Rng rng(spec.seed);

  TokenMatrix concepts(spec.num_concepts, dim);
  for (std::size_t c = 0; c < spec.num_concepts; ++c) {
    const auto v = random_unit(rng, dim);
    std::copy(v.begin(), v.end(), concepts.row(c).begin());
  }
  const std::vector<float> background = random_unit(rng, dim);

  std::vector<Doc> docs(spec.doc_count);
  std::vector<std::vector<std::size_t>> doc_concepts(spec.doc_count);
  std::vector<std::size_t> all_concepts(spec.num_concepts);
  std::iota(all_concepts.begin(), all_concepts.end(), 0);
  std::uniform_int_distribution<std::size_t> length_dist(spec.min_tokens, spec.max_tokens);
  for (std::size_t d = 0; d < spec.doc_count; ++d) {
    const std::size_t rows = length_dist(rng);
    std::vector<std::size_t> chosen;
    std::sample(all_concepts.begin(), all_concepts.end(), std::back_inserter(chosen), spec.concepts_per_doc, rng);
    std::shuffle(chosen.begin(), chosen.end(), rng);
    // A fixed background share per document keeps filler scores comparable
    // across documents; at least one concept row always remains.
    std::size_t bg = static_cast<std::size_t>(std::llround(spec.background_rate * static_cast<double>(rows)));
    if (spec.background_rate > 0.0 && bg == 0 && rows > 1) bg = 1;
    bg = std::min(bg, rows - 1);
    std::vector<char> is_bg(rows, 0);
    std::fill(is_bg.begin(), is_bg.begin() + static_cast<std::ptrdiff_t>(bg), 1);
    std::shuffle(is_bg.begin(), is_bg.end(), rng);

    Doc& doc = docs[d];
    doc.rows = TokenMatrix(rows, dim);
    std::size_t next_concept = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (is_bg[r]) {
        perturb(background, spec.background_noise, rng, doc.rows.row(r));
      } else {
        perturb(concepts.row(chosen[next_concept++ % chosen.size()]), spec.doc_noise, rng, doc.rows.row(r));
        doc.concept_rows.push_back(r);
      }
    }
    doc_concepts[d] = std::move(chosen);
  }

  std::vector<std::size_t> targets(spec.doc_count);
  std::iota(targets.begin(), targets.end(), 0);
  std::shuffle(targets.begin(), targets.end(), rng);
  targets.resize(spec.queries);
  const std::uint64_t query_seed = rng();

  const std::size_t filler = spec.filler_tokens();
  const std::size_t qrows = spec.signal_tokens + filler;
  std::vector<Query> queries(spec.queries);
  std::vector<char> feasible(spec.queries, 0);
  parallel_for(spec.queries, [&](std::size_t q) {
    std::seed_seq seq{query_seed, static_cast<std::uint64_t>(q)};
    Rng qrng(seq);
    const Doc& target = docs[targets[q]];
    std::vector<double> best_other(qrows);
    for (std::size_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
      TokenMatrix m(qrows, dim);
      for (std::size_t s = 0; s < spec.signal_tokens; ++s) {
        const std::size_t src = target.concept_rows[s % target.concept_rows.size()];
        perturb(target.rows.row(src), spec.query_noise, qrng, m.row(s));
      }
      for (std::size_t f = spec.signal_tokens; f < qrows; ++f) perturb(background, spec.background_noise, qrng, m.row(f));

      // Prefix sums of per-row maxima give every truncated score at once.
      const std::vector<double> terms = maxsim_terms(m, target.rows);
      std::vector<double> target_prefix(qrows);
      std::partial_sum(terms.begin(), terms.end(), target_prefix.begin());
      std::fill(best_other.begin(), best_other.end(), -std::numeric_limits<double>::infinity());
      for (std::size_t d = 0; d < spec.doc_count; ++d) {
        if (d == targets[q]) continue;
        const std::vector<double> t = maxsim_terms(m, docs[d].rows);
        double acc = 0.0;
        for (std::size_t i = 0; i < qrows; ++i) {
          acc += t[i];
          best_other[i] = std::max(best_other[i], acc);
        }
      }
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t i = spec.signal_tokens - 1; i < qrows; ++i) {
        worst = std::min(worst, target_prefix[i] - best_other[i]);
      }
      if (worst >= spec.margin) {
        queries[q].rows = std::move(m);
        queries[q].margin = worst;
        const double full = target_prefix.back();
        queries[q].relative_margin = (full - best_other.back()) / full;
        feasible[q] = 1;
        return;
      }
    }
  });
  for (std::size_t q = 0; q < spec.queries; ++q) {
    if (!feasible[q]) {
      fail(ErrorCode::kSpecInfeasible, "query " + std::to_string(q) + " could not reach margin " +
                                           std::to_string(spec.margin) + " within " +
                                           std::to_string(spec.max_attempts) + " attempts");
    }
  }

  std::vector<std::string> doc_ids(spec.doc_count);
  std::vector<TokenMatrix> doc_mats(spec.doc_count);
  for (std::size_t d = 0; d < spec.doc_count; ++d) {
    doc_ids[d] = padded('D', d, 6);
    doc_mats[d] = std::move(docs[d].rows);
  }
  std::vector<std::string> query_ids(spec.queries);
  std::vector<TokenMatrix> query_mats(spec.queries);
  Qrels qrels;
  std::vector<double> margins(spec.queries);
  std::vector<double> relative(spec.queries);
  for (std::size_t q = 0; q < spec.queries; ++q) {
    query_ids[q] = padded('Q', q, 5);
    query_mats[q] = std::move(queries[q].rows);
    margins[q] = queries[q].margin;
    relative[q] = queries[q].relative_margin;
    qrels.add(query_ids[q], doc_ids[targets[q]], 1);
  }
  return SyntheticData{Corpus(std::move(doc_ids), std::move(doc_mats)),
                       Corpus(std::move(query_ids), std::move(query_mats)),
                       std::move(qrels),
                       std::move(concepts),
                       std::move(doc_concepts),
                       std::move(targets),
                       std::move(margins),
                       std::move(relative)};
}

}  // namespace latebench
