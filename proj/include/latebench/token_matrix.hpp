#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "latebench/error.hpp"

namespace latebench {

inline constexpr double kUnitNormTolerance = 1e-4;

/// Row-major matrix of token (or pooled slot) embeddings, one row per vector.
///
/// Rows are expected to be unit-norm so that inner products are cosines;
/// construction does not enforce that, validate_matrix() does.
class TokenMatrix {
 public:
  TokenMatrix() = default;
  TokenMatrix(std::size_t rows, std::size_t dim);
  TokenMatrix(std::size_t rows, std::size_t dim, std::vector<float> data);

  static TokenMatrix from_rows(std::initializer_list<std::initializer_list<float>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<float> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  /// First min(n, rows()) rows.
  TokenMatrix prefix(std::size_t n) const;

  bool operator==(const TokenMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

/// Outcome of validate_matrix. On failure `row`/`col`/`norm` locate the fault.
struct MatrixCheck {
  ErrorCode code = ErrorCode::kOk;
  std::size_t row = 0;
  std::size_t col = 0;
  double norm = 0.0;

  bool ok() const noexcept { return code == ErrorCode::kOk; }
};

MatrixCheck validate_matrix(const TokenMatrix& m, double tolerance = kUnitNormTolerance);

/// Throws Error carrying the MatrixCheck code when the matrix is invalid.
void require_valid(const TokenMatrix& m, double tolerance = kUnitNormTolerance);

/// Scales v to unit length. Returns false (and leaves v untouched) when the
/// norm is zero or not finite.
bool normalize(std::span<float> v) noexcept;

/// Late-interaction relevance: sum over query rows of the best inner product
/// against any document row. Summation runs query-row-major in double.
double maxsim_score(const TokenMatrix& query, const TokenMatrix& doc);

/// Per-query-row maxima behind maxsim_score (prefix sums of this vector are
/// the scores of truncated queries).
std::vector<double> maxsim_terms(const TokenMatrix& query, const TokenMatrix& doc);

/// Deterministic fixed-length pooling: splits the rows into `slots`
/// contiguous chunks (the first rows % slots chunks get one extra row),
/// averages each chunk and renormalizes. Short documents are cycled up to
/// `slots` rows first. This is a structural stand-in for learned pooling.
TokenMatrix pool_fixed(const TokenMatrix& doc, std::size_t slots);

}  // namespace latebench
