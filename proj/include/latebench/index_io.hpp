#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "latebench/corpus.hpp"
#include "latebench/ivf_index.hpp"
#include "latebench/plaid_index.hpp"

namespace latebench {

enum class Backend { kExact, kIvf, kPlaid };

std::string_view backend_name(Backend b) noexcept;
Backend parse_backend(std::string_view name);

// Index file layout:
//
//   LATEBENCH-INDEX\n
//   version 1\n
//   # <comment>\n                 (any number)
//   backend exact|ivf|plaid\n
//   <config key/value lines>\n
//   dim <d>\n
//   centroids <K>\n
//   vectors <T>\n
//   corpus embedded|omitted\n
//   doc <id> <rows>\n             (only when the corpus is omitted)
//   end\n
//   <K*d float32 centroids><T uint32 centroid ids>
//   <T residual codes: float32 scale + packed bits>   (plaid, residual_bits > 0)
//   <embedded bundle, to end of file>                  (when embedded)
//
// All binary fields are little-endian. A plaid index with residuals omits
// the raw corpus and rescores from decoded residuals.

inline constexpr std::string_view kIndexMagic = "LATEBENCH-INDEX";
inline constexpr int kIndexVersion = 1;

/// Any built backend behind one handle.
struct AnyIndex {
  Backend backend = Backend::kExact;
  std::shared_ptr<const Corpus> corpus;  // null for plaid-with-residuals loads
  std::shared_ptr<const IvfIndex> ivf;
  std::shared_ptr<const PlaidIndex> plaid;
  std::shared_ptr<const ExactRetriever> exact;

  const Retriever& retriever() const;
  std::size_t dim() const;
  std::size_t doc_count() const;
};

AnyIndex make_exact_index(std::shared_ptr<const Corpus> corpus);

std::string write_index(const AnyIndex& index, const std::vector<std::string>& comments = {});
AnyIndex read_index(std::string_view bytes);

}  // namespace latebench
