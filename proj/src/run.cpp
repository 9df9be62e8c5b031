#include "latebench/run.hpp"

#include <limits>
#include <vector>

#include "latebench/parallel.hpp"

namespace latebench {

Run search_all_truncated(const Retriever& retriever, const Corpus& queries, std::size_t k,
                         std::size_t max_rows) {
  std::vector<RankedList> lists(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    const TokenMatrix& q = queries.doc(i);
    lists[i] = q.rows() > max_rows ? retriever.retrieve(queries.id(i), q.prefix(max_rows), k)
                                   : retriever.retrieve(queries.id(i), q, k);
  });
  Run run;
  for (auto& l : lists) {
    std::string id = l.query_id;
    run.lists.emplace(std::move(id), std::move(l));
  }
  return run;
}

Run search_all(const Retriever& retriever, const Corpus& queries, std::size_t k) {
  return search_all_truncated(retriever, queries, k, std::numeric_limits<std::size_t>::max());
}

}  // namespace latebench
