#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "latebench/corpus.hpp"

namespace latebench {

/// Ranked lists for a batch of queries, keyed (and iterated) by query id.
struct Run {
  std::map<std::string, RankedList> lists;

  bool operator==(const Run&) const = default;
};

/// Runs every query in `queries` through `retriever`, parallel across
/// queries with results placed by query id.
Run search_all(const Retriever& retriever, const Corpus& queries, std::size_t k);

/// Same, with each query truncated to its first `max_rows` rows.
Run search_all_truncated(const Retriever& retriever, const Corpus& queries, std::size_t k,
                         std::size_t max_rows);

}  // namespace latebench
