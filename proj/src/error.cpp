#include "latebench/error.hpp"

#include <iostream>
#include <mutex>

namespace latebench {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kTooFewVectors: return "TooFewVectors";
    case ErrorCode::kNDocsTooSmall: return "NDocsTooSmall";
    case ErrorCode::kUnknownDoc: return "UnknownDoc";
    case ErrorCode::kUnsupportedBits: return "UnsupportedBits";
    case ErrorCode::kQueryMissingFromQrels: return "QueryMissingFromQrels";
    case ErrorCode::kZeroRelevant: return "ZeroRelevant";
    case ErrorCode::kEmptyLengths: return "EmptyLengths";
    case ErrorCode::kNoSharedQueries: return "NoSharedQueries";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kOffsetOverlap: return "OffsetOverlap";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kDuplicateJudgment: return "DuplicateJudgment";
    case ErrorCode::kNonContiguousRanks: return "NonContiguousRanks";
    case ErrorCode::kSpecInfeasible: return "SpecInfeasible";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

void set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(h);
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler()) {
    handler()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace latebench
