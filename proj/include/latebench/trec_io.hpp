#pragma once

#include <string>
#include <string_view>

#include "latebench/metrics.hpp"
#include "latebench/run.hpp"

namespace latebench {

// qrels line: "qid iter docid grade"; run line: "qid Q0 docid rank score tag".
// Blank lines and lines starting with '#' are skipped; columns may be
// separated by any run of spaces or tabs.

Qrels parse_qrels(std::string_view text);
std::string write_qrels(const Qrels& qrels);

/// Entries are ordered by score (ties by doc id) regardless of the rank
/// column; ranks that are not 1..n in that order raise a warning.
Run parse_run(std::string_view text);

/// Emits ranks 1..n. Fails with kNonContiguousRanks if a list violates the
/// ranking contract or repeats a document.
std::string write_run(const Run& run, std::string_view tag);

/// Shortest round-trip decimal form.
std::string format_score(double value);

}  // namespace latebench
