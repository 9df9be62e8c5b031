#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "latebench/corpus.hpp"
#include "latebench/metrics.hpp"

namespace latebench {

/// Planted-relevance corpus description.
///
/// Documents mix `concepts_per_doc` concept directions (noisy copies, one
/// row each) with `background_rate` of rows drawn around one shared
/// background direction. Each query targets one document: its first
/// `signal_tokens` rows are perturbed copies of the target's concept rows,
/// followed by filler rows drawn around the background direction so that
/// filler / (signal + filler) ~= filler_fraction.
struct SyntheticSpec {
  std::size_t doc_count = 1000;
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 32;
  std::size_t dim = 128;
  std::size_t num_concepts = 64;
  std::size_t concepts_per_doc = 3;
  std::size_t queries = 100;
  std::size_t signal_tokens = 8;
  double filler_fraction = 0.0;
  double margin = 0.05;
  double doc_noise = 0.5;
  double query_noise = 0.2;
  double background_rate = 0.1;
  double background_noise = 1.0;
  std::uint64_t seed = 7;
  std::size_t max_attempts = 50;

  void validate() const;
  std::size_t filler_tokens() const;
};

struct SyntheticData {
  Corpus corpus;
  Corpus queries;
  Qrels qrels;
  TokenMatrix concepts;                          // num_concepts x dim
  std::vector<std::vector<std::size_t>> doc_concepts;
  std::vector<std::size_t> targets;              // target doc ordinal per query
  std::vector<double> margins;                   // min over prefixes of target - runner-up
  std::vector<double> relative_margins;          // full-query gap / target score
};

/// Deterministic for a fixed spec. Each query's target outscores every other
/// document by at least `margin` under exact MaxSim for every prefix of at
/// least signal_tokens rows; a query violating that is redrawn, and after
/// max_attempts the call fails with kSpecInfeasible.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace latebench
