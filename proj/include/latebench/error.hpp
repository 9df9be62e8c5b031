#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace latebench {

// Numeric values are part of the C ABI (see latebench.h) and must not change.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kNotNormalized = 2,
  kNonFinite = 3,
  kEmptyMatrix = 4,
  kDimensionMismatch = 5,
  kEmptyCorpus = 6,
  kTooFewVectors = 7,
  kNDocsTooSmall = 8,
  kUnknownDoc = 9,
  kUnsupportedBits = 10,
  kQueryMissingFromQrels = 11,
  kZeroRelevant = 12,
  kEmptyLengths = 13,
  kNoSharedQueries = 14,
  kEmptyIndex = 15,
  kBadMagic = 16,
  kVersionMismatch = 17,
  kTruncatedPayload = 18,
  kOffsetOverlap = 19,
  kMalformedLine = 20,
  kDuplicateJudgment = 21,
  kNonContiguousRanks = 22,
  kSpecInfeasible = 23,
  kIo = 24,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

// Non-fatal conditions (skipped queries, clamped samples, irregular ranks)
// are reported through a process-wide handler. Default prints to stderr.
using WarningHandler = std::function<void(std::string_view)>;

void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace latebench
