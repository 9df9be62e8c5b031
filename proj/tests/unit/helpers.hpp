#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "latebench/corpus.hpp"

namespace latebench::testing {

inline TokenMatrix random_unit_matrix(std::size_t rows, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<float> normal;
  TokenMatrix m(rows, dim);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = m.row(r);
    for (float& x : row) x = normal(rng);
    normalize(row);
  }
  return m;
}

inline TokenMatrix basis(std::size_t dim, const std::vector<std::size_t>& axes) {
  TokenMatrix m(axes.size(), dim);
  std::size_t r = 0;
  for (std::size_t a : axes) m.row(r++)[a] = 1.0f;
  return m;
}

// Independent triple-loop MaxSim, all in double.
inline double naive_maxsim(const TokenMatrix& q, const TokenMatrix& d) {
  double total = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double best = -1e300;
    for (std::size_t j = 0; j < d.rows(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < q.dim(); ++c) s += static_cast<double>(q.row(i)[c]) * d.row(j)[c];
      best = std::max(best, s);
    }
    total += best;
  }
  return total;
}

inline Corpus random_corpus(std::size_t docs, std::size_t min_rows, std::size_t max_rows, std::size_t dim,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(min_rows, max_rows);
  std::vector<std::string> ids;
  std::vector<TokenMatrix> mats;
  for (std::size_t d = 0; d < docs; ++d) {
    ids.push_back("doc" + std::to_string(d));
    mats.push_back(random_unit_matrix(len(rng), dim, rng));
  }
  return Corpus(std::move(ids), std::move(mats));
}

}  // namespace latebench::testing
