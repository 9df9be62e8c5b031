#include "latebench/token_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "latebench/kernels.hpp"

namespace latebench {

TokenMatrix::TokenMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {}

TokenMatrix::TokenMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (data_.size() != rows_ * dim_) {
    fail(ErrorCode::kInvalidArgument, "matrix data has " + std::to_string(data_.size()) +
                                          " values, expected " + std::to_string(rows_ * dim_));
  }
}

TokenMatrix TokenMatrix::from_rows(std::initializer_list<std::initializer_list<float>> rows) {
  const std::size_t dim = rows.size() ? rows.begin()->size() : 0;
  std::vector<float> data;
  data.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) fail(ErrorCode::kDimensionMismatch, "ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return TokenMatrix(rows.size(), dim, std::move(data));
}

TokenMatrix TokenMatrix::prefix(std::size_t n) const {
  const std::size_t keep = std::min(n, rows_);
  return TokenMatrix(keep, dim_,
                     std::vector<float>(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(keep * dim_)));
}

MatrixCheck validate_matrix(const TokenMatrix& m, double tolerance) {
  MatrixCheck check;
  if (m.rows() == 0 || m.dim() == 0) {
    check.code = ErrorCode::kEmptyMatrix;
    return check;
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    double sq = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c])) {
        check.code = ErrorCode::kNonFinite;
        check.row = r;
        check.col = c;
        return check;
      }
      sq += static_cast<double>(row[c]) * row[c];
    }
    const double norm = std::sqrt(sq);
    if (std::abs(norm - 1.0) > tolerance) {
      check.code = ErrorCode::kNotNormalized;
      check.row = r;
      check.norm = norm;
      return check;
    }
  }
  return check;
}

void require_valid(const TokenMatrix& m, double tolerance) {
  const MatrixCheck check = validate_matrix(m, tolerance);
  switch (check.code) {
    case ErrorCode::kOk:
      return;
    case ErrorCode::kEmptyMatrix:
      fail(check.code, "empty matrix (" + std::to_string(m.rows()) + "x" + std::to_string(m.dim()) + ")");
    case ErrorCode::kNonFinite:
      fail(check.code, "non-finite value at row " + std::to_string(check.row) + ", col " +
                           std::to_string(check.col));
    default:
      fail(check.code, "row " + std::to_string(check.row) + " has norm " + std::to_string(check.norm));
  }
}

bool normalize(std::span<float> v) noexcept {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) return false;
  for (float& x : v) x = static_cast<float>(x / norm);
  return true;
}

namespace {

void check_dims(const TokenMatrix& query, const TokenMatrix& doc) {
  if (query.dim() != doc.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "query dim " + std::to_string(query.dim()) + " vs doc dim " + std::to_string(doc.dim()));
  }
}

float best_match(std::span<const float> q, const TokenMatrix& doc) {
  float best = -std::numeric_limits<float>::infinity();
  for (std::size_t j = 0; j < doc.rows(); ++j) best = std::max(best, dot(q, doc.row(j)));
  return best;
}

}  // namespace

double maxsim_score(const TokenMatrix& query, const TokenMatrix& doc) {
  check_dims(query, doc);
  double total = 0.0;
  for (std::size_t i = 0; i < query.rows(); ++i) total += best_match(query.row(i), doc);
  return total;
}

std::vector<double> maxsim_terms(const TokenMatrix& query, const TokenMatrix& doc) {
  check_dims(query, doc);
  std::vector<double> terms(query.rows());
  for (std::size_t i = 0; i < query.rows(); ++i) terms[i] = best_match(query.row(i), doc);
  return terms;
}

TokenMatrix pool_fixed(const TokenMatrix& doc, std::size_t slots) {
  if (slots == 0) fail(ErrorCode::kInvalidArgument, "pool_fixed needs at least one slot");
  require_valid(doc);
  const std::size_t dim = doc.dim();
  TokenMatrix out(slots, dim);
  if (doc.rows() <= slots) {
    for (std::size_t s = 0; s < slots; ++s) {
      const auto src = doc.row(s % doc.rows());
      std::copy(src.begin(), src.end(), out.row(s).begin());
    }
    return out;
  }
  const std::size_t base = doc.rows() / slots;
  const std::size_t extra = doc.rows() % slots;
  std::size_t start = 0;
  std::vector<double> mean(dim);
  for (std::size_t s = 0; s < slots; ++s) {
    const std::size_t len = base + (s < extra ? 1 : 0);
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t r = start; r < start + len; ++r) {
      const auto row = doc.row(r);
      for (std::size_t c = 0; c < dim; ++c) mean[c] += row[c];
    }
    auto dst = out.row(s);
    for (std::size_t c = 0; c < dim; ++c) dst[c] = static_cast<float>(mean[c] / static_cast<double>(len));
    // A chunk of cancelling vectors has no direction; keep its first row.
    if (!normalize(dst)) {
      const auto first = doc.row(start);
      std::copy(first.begin(), first.end(), dst.begin());
    }
    start += len;
  }
  return out;
}

}  // namespace latebench
